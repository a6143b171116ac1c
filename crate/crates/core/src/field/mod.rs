//! Field composition: crop rows with dormancy gaps, weeds, soil and debris.

mod debris;
mod library;
mod soil;

use std::sync::Arc;

use glam::{DMat3, DVec2, DVec3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use debris::{debris_shapes, morisita_index, scatter_debris, DebrisConfig, DebrisInstance, DebrisShape};
pub use library::{LibraryConfig, PlantLibrary};
pub use soil::{
    adjacent_repeats, synthesize_soil, tile_soil, SoilConfig, SoilDescriptor, SoilPatch, SoilPatchEntry, SoilTexture,
    SoilTextureSet, TileAssignment, TireTrack, TireTrackConfig, SOIL_PRESETS,
};

pub use crate::noise::fbm_perlin;
use crate::lsys::OrganLabel;
use crate::plants::{PlantAssembly, SemanticClass, Species};
use crate::seed::{sub_seed, substream};

pub const ROW_SPACING_ENVELOPE: (f64, f64) = (0.38, 0.76);
pub const PLANT_SPACING_ENVELOPE: (f64, f64) = (0.05, 0.10);
pub const DORMANCY_ENVELOPE: (f64, f64) = (0.10, 0.15);
pub const WEED_COUNT_ENVELOPE: (u32, u32) = (1, 10);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("`{key}` = {value} is outside the agronomic envelope [{lo}, {hi}]")]
    OutOfEnvelope { key: &'static str, value: String, lo: f64, hi: f64 },
    #[error("`{key}`: {message}")]
    InvalidRange { key: &'static str, message: String },
    #[error("field extent {extent:?} m is too small for one full row at spacing ({row_spacing}, {plant_spacing}) m")]
    ExtentTooSmall { extent: (f64, f64), row_spacing: f64, plant_spacing: f64 },
    #[error("plant library has no {0} assemblies")]
    EmptyLibrary(Species),
    #[error("soil needs at least 2 texture patches, got {0}")]
    NotEnoughPatches(usize),
    #[error("soil textures: {0}")]
    Soil(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeedPlacement {
    BetweenRows,
    WithinRows,
    Both,
}

/// Weed placement setting: a fixed mode, or one drawn per field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeedPlacementMode {
    #[default]
    Random,
    BetweenRows,
    WithinRows,
    Both,
}

/// Ranges the per-field layout is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub row_spacing: (f64, f64),
    pub plant_spacing: (f64, f64),
    pub dormancy_fraction: (f64, f64),
    pub weed_count: (u32, u32),
    pub weed_placement: WeedPlacementMode,
    /// Probability that a weed is grassy rather than broadleaf.
    pub grassy_probability: f64,
    /// Planted extent (x across rows, y along rows), m.
    pub extent: (f64, f64),
    /// Crop position jitter: σ and truncation as fractions of the plant spacing.
    pub jitter_sigma: f64,
    pub jitter_limit: f64,
    /// Accept ranges outside the agronomic envelopes.
    pub allow_out_of_envelope: bool,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            row_spacing: ROW_SPACING_ENVELOPE,
            plant_spacing: PLANT_SPACING_ENVELOPE,
            dormancy_fraction: DORMANCY_ENVELOPE,
            weed_count: WEED_COUNT_ENVELOPE,
            weed_placement: WeedPlacementMode::Random,
            grassy_probability: 0.5,
            extent: (1.6, 1.2),
            jitter_sigma: 0.1,
            jitter_limit: 0.3,
            allow_out_of_envelope: false,
        }
    }
}

fn check_range(key: &'static str, r: (f64, f64), env: (f64, f64), allow: bool) -> Result<(), FieldError> {
    if !(r.0.is_finite() && r.1.is_finite()) || r.0 > r.1 {
        return Err(FieldError::InvalidRange {
            key,
            message: format!("expected finite lo <= hi, got ({}, {})", r.0, r.1),
        });
    }
    if !allow && (r.0 < env.0 - 1e-12 || r.1 > env.1 + 1e-12) {
        return Err(FieldError::OutOfEnvelope {
            key,
            value: format!("({}, {})", r.0, r.1),
            lo: env.0,
            hi: env.1,
        });
    }
    Ok(())
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<(), FieldError> {
        let allow = self.allow_out_of_envelope;
        check_range("row_spacing", self.row_spacing, ROW_SPACING_ENVELOPE, allow)?;
        check_range("plant_spacing", self.plant_spacing, PLANT_SPACING_ENVELOPE, allow)?;
        check_range("dormancy_fraction", self.dormancy_fraction, DORMANCY_ENVELOPE, allow)?;
        let wc = (self.weed_count.0 as f64, self.weed_count.1 as f64);
        let we = (WEED_COUNT_ENVELOPE.0 as f64, WEED_COUNT_ENVELOPE.1 as f64);
        check_range("weed_count", wc, we, allow)?;
        let positive = |key, r: (f64, f64)| {
            if r.0 > 0.0 {
                Ok(())
            } else {
                Err(FieldError::InvalidRange { key, message: "must be positive".into() })
            }
        };
        positive("row_spacing", self.row_spacing)?;
        positive("plant_spacing", self.plant_spacing)?;
        if !(0.0..=1.0).contains(&self.dormancy_fraction.0) || !(0.0..=1.0).contains(&self.dormancy_fraction.1) {
            return Err(FieldError::InvalidRange {
                key: "dormancy_fraction",
                message: "must lie in [0, 1]".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.grassy_probability) {
            return Err(FieldError::InvalidRange {
                key: "grassy_probability",
                message: "must lie in [0, 1]".into(),
            });
        }
        if !(self.extent.0 > 0.0 && self.extent.1 > 0.0) {
            return Err(FieldError::InvalidRange { key: "extent", message: "must be positive".into() });
        }
        if !(self.jitter_sigma >= 0.0 && self.jitter_limit >= 0.0 && self.jitter_limit < 0.5) {
            return Err(FieldError::InvalidRange {
                key: "jitter_limit",
                message: "jitter must be non-negative with limit below 0.5".into(),
            });
        }
        Ok(())
    }
}

/// One sampled field arrangement. The field is centred on the origin with
/// rows running along +Y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldLayout {
    pub row_spacing: f64,
    pub plant_spacing: f64,
    pub rows: usize,
    pub plants_per_row: usize,
    pub dormancy_fraction: f64,
    pub weed_count: usize,
    pub weed_placement: WeedPlacement,
    pub extent: (f64, f64),
}

impl FieldLayout {
    pub fn min(&self) -> DVec2 {
        DVec2::new(-self.extent.0, -self.extent.1) * 0.5
    }

    pub fn max(&self) -> DVec2 {
        DVec2::new(self.extent.0, self.extent.1) * 0.5
    }

    pub fn row_x(&self, r: usize) -> f64 {
        (r as f64 - (self.rows as f64 - 1.0) * 0.5) * self.row_spacing
    }

    pub fn slot_y(&self, s: usize) -> f64 {
        (s as f64 - (self.plants_per_row as f64 - 1.0) * 0.5) * self.plant_spacing
    }

    /// Distance from `x` to the nearest row line.
    pub fn row_distance(&self, x: f64) -> f64 {
        (0..self.rows).map(|r| (x - self.row_x(r)).abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: DVec2) -> bool {
        let (lo, hi) = (self.min(), self.max());
        p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Draws one layout from the configured ranges.
pub fn sample_layout<R: Rng + ?Sized>(cfg: &LayoutConfig, rng: &mut R) -> Result<FieldLayout, FieldError> {
    cfg.validate()?;
    let row_spacing = uniform(rng, cfg.row_spacing);
    let plant_spacing = uniform(rng, cfg.plant_spacing);
    let dormancy_fraction = uniform(rng, cfg.dormancy_fraction);
    let weed_count = rng.random_range(cfg.weed_count.0..=cfg.weed_count.1) as usize;
    let weed_placement = match cfg.weed_placement {
        WeedPlacementMode::Random => {
            [WeedPlacement::BetweenRows, WeedPlacement::WithinRows, WeedPlacement::Both][rng.random_range(0..3)]
        }
        WeedPlacementMode::BetweenRows => WeedPlacement::BetweenRows,
        WeedPlacementMode::WithinRows => WeedPlacement::WithinRows,
        WeedPlacementMode::Both => WeedPlacement::Both,
    };
    let rows = (cfg.extent.0 / row_spacing).floor() as usize;
    let plants_per_row = (cfg.extent.1 / plant_spacing).floor() as usize;
    if rows < 1 || plants_per_row < 1 {
        return Err(FieldError::ExtentTooSmall {
            extent: cfg.extent,
            row_spacing,
            plant_spacing,
        });
    }
    Ok(FieldLayout {
        row_spacing,
        plant_spacing,
        rows,
        plants_per_row,
        dormancy_fraction,
        weed_count,
        weed_placement,
        extent: cfg.extent,
    })
}

/// Rigid placement on the ground: yaw about +Z, uniform scale, translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub position: DVec3,
    pub yaw: f64,
    pub scale: f64,
}

impl Placement {
    pub fn matrix(&self) -> DMat3 {
        DMat3::from_rotation_z(self.yaw) * self.scale
    }

    pub fn apply(&self, p: DVec3) -> DVec3 {
        self.matrix() * p + self.position
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantInstance {
    /// 1-based id written to the instance buffer.
    pub id: u16,
    pub species: Species,
    pub library_index: usize,
    pub placement: Placement,
    pub semantic_class: SemanticClass,
    pub footprint_radius: f64,
    /// Horizontal radius of the stem at the ground, m.
    pub stem_radius: f64,
    /// Row and slot of a crop plant.
    pub slot: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub layout: LayoutConfig,
    pub soil: SoilConfig,
    pub debris: DebrisConfig,
}

impl FieldConfig {
    pub fn validate(&self) -> Result<(), FieldError> {
        self.layout.validate()?;
        let d = self.debris.density;
        if !(d.0 >= 0.0 && d.0 <= d.1) {
            return Err(FieldError::InvalidRange {
                key: "debris.density",
                message: format!("expected 0 <= lo <= hi, got ({}, {})", d.0, d.1),
            });
        }
        if !(self.soil.tile_size > 0.0 && self.soil.margin >= 0.0) {
            return Err(FieldError::InvalidRange {
                key: "soil.tile_size",
                message: "tile size must be positive and margin non-negative".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FieldScene {
    pub layout: FieldLayout,
    pub soil: SoilPatch,
    pub library: Arc<PlantLibrary>,
    pub instances: Vec<PlantInstance>,
    /// Crop slots left empty by dormancy, as (row, slot).
    pub dormant: Vec<(usize, usize)>,
    pub debris_shapes: Arc<Vec<DebrisShape>>,
    pub debris: Vec<DebrisInstance>,
    pub debris_density: f64,
}

impl PartialEq for FieldScene {
    fn eq(&self, o: &Self) -> bool {
        self.layout == o.layout
            && self.soil == o.soil
            && self.instances == o.instances
            && self.dormant == o.dormant
            && self.debris == o.debris
            && self.debris_shapes == o.debris_shapes
    }
}

impl FieldScene {
    pub fn assembly(&self, inst: &PlantInstance) -> &PlantAssembly {
        &self.library.plants[&inst.species][inst.library_index]
    }

    pub fn count(&self, class: SemanticClass) -> usize {
        self.instances.iter().filter(|i| i.semantic_class == class).count()
    }

    pub fn species_count(&self, species: Species) -> usize {
        self.instances.iter().filter(|i| i.species == species).count()
    }

    /// Fraction of crop slots left empty.
    pub fn missing_fraction(&self) -> f64 {
        let slots = self.layout.rows * self.layout.plants_per_row;
        self.dormant.len() as f64 / slots as f64
    }
}

/// Horizontal radius of the stem near the ground.
pub fn stem_base_radius(plant: &PlantAssembly) -> f64 {
    plant
        .meshes
        .iter()
        .filter(|m| m.label == OrganLabel::Stem)
        .flat_map(|m| m.positions.iter())
        .filter(|p| p.z < 0.01)
        .map(|p| (p.x as f64).hypot(p.y as f64))
        .fold(0.0, f64::max)
}

fn pick<R: Rng + ?Sized>(lib: &PlantLibrary, sp: Species, rng: &mut R) -> Result<usize, FieldError> {
    match lib.count(sp) {
        0 => Err(FieldError::EmptyLibrary(sp)),
        n => Ok(rng.random_range(0..n)),
    }
}

/// Composes a full scene: layout, soil, crops, weeds, then debris.
pub fn compose_field(
    cfg: &FieldConfig,
    library: Arc<PlantLibrary>,
    soil_textures: Arc<SoilTextureSet>,
    seed: u64,
) -> Result<FieldScene, FieldError> {
    cfg.validate()?;
    let lc = &cfg.layout;
    let layout = sample_layout(lc, &mut substream(seed, "layout"))?;
    for sp in Species::ALL {
        if library.count(sp) == 0 && (sp == Species::Soybean || layout.weed_count > 0) {
            return Err(FieldError::EmptyLibrary(sp));
        }
    }
    let margin = DVec2::splat(cfg.soil.margin);
    let soil = synthesize_soil(layout.min() - margin, layout.max() + margin, soil_textures, &cfg.soil, seed)?;

    let mut instances: Vec<PlantInstance> = Vec::new();
    let mut dormant = Vec::new();
    let ps = layout.plant_spacing;
    let limit = lc.jitter_limit * ps;
    let normal = Normal::new(0.0, (lc.jitter_sigma * ps).max(1e-12)).expect("finite sigma");
    let mut rng = substream(seed, "crops");
    let jitter = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let v: f64 = normal.sample(rng);
        if v.abs() <= limit {
            return v;
        }
    };
    for r in 0..layout.rows {
        let mut last: Option<DVec2> = None;
        for s in 0..layout.plants_per_row {
            if rng.random_bool(layout.dormancy_fraction) {
                dormant.push((r, s));
                continue;
            }
            let nominal = DVec2::new(layout.row_x(r), layout.slot_y(s));
            let mut p = nominal + DVec2::new(jitter(&mut rng), jitter(&mut rng));
            let mut tries = 0;
            while last.is_some_and(|q| q.distance(p) < 0.8 * ps) {
                tries += 1;
                if tries > 32 {
                    // Push along the row to the minimum distance; stays within the jitter bound.
                    let q = last.expect("checked");
                    p = DVec2::new(nominal.x, nominal.y.max(q.y + 0.8 * ps));
                    break;
                }
                p = nominal + DVec2::new(jitter(&mut rng), jitter(&mut rng));
            }
            last = Some(p);
            let idx = pick(&library, Species::Soybean, &mut rng)?;
            let yaw = rng.random_range(0.0..std::f64::consts::TAU);
            let plant = &library.plants[&Species::Soybean][idx];
            instances.push(PlantInstance {
                id: 0,
                species: Species::Soybean,
                library_index: idx,
                placement: Placement {
                    position: p.extend(soil.height_at(p)),
                    yaw,
                    scale: 1.0,
                },
                semantic_class: SemanticClass::Crop,
                footprint_radius: plant.footprint_radius,
                stem_radius: stem_base_radius(plant),
                slot: Some((r, s)),
            });
        }
    }

    let mut rng = substream(seed, "weeds");
    let (lo, hi) = (layout.min(), layout.max());
    for _ in 0..layout.weed_count {
        let sp = if rng.random_bool(lc.grassy_probability) {
            Species::GrassyWeed
        } else {
            Species::BroadleafWeed
        };
        let mut idx = pick(&library, sp, &mut rng)?;
        let mode = match layout.weed_placement {
            WeedPlacement::Both => {
                if rng.random_bool(0.5) {
                    WeedPlacement::BetweenRows
                } else {
                    WeedPlacement::WithinRows
                }
            }
            m => m,
        };
        let p = if mode == WeedPlacement::BetweenRows && layout.rows >= 2 {
            let g = rng.random_range(0..layout.rows - 1);
            let x = layout.row_x(g) + layout.row_spacing * (1.0 + rng.random::<f64>()) / 3.0;
            let y = rng.random_range(lo.y..=hi.y);
            // Keep the weed's canopy clear of the rows.
            let clear = layout.row_distance(x);
            let mut tries = 0;
            while library.plants[&sp][idx].footprint_radius >= clear && tries < 64 {
                idx = pick(&library, sp, &mut rng)?;
                tries += 1;
            }
            if library.plants[&sp][idx].footprint_radius >= clear {
                idx = (0..library.count(sp))
                    .min_by(|a, b| {
                        let fa = library.plants[&sp][*a].footprint_radius;
                        let fb = library.plants[&sp][*b].footprint_radius;
                        fa.total_cmp(&fb)
                    })
                    .expect("non-empty");
            }
            DVec2::new(x, y)
        } else {
            let r = rng.random_range(0..layout.rows);
            let y = if layout.plants_per_row >= 2 {
                let s = rng.random_range(0..layout.plants_per_row - 1);
                0.5 * (layout.slot_y(s) + layout.slot_y(s + 1))
            } else {
                rng.random_range(lo.y..=hi.y)
            };
            DVec2::new(layout.row_x(r), y)
        };
        let yaw = rng.random_range(0.0..std::f64::consts::TAU);
        let plant = &library.plants[&sp][idx];
        instances.push(PlantInstance {
            id: 0,
            species: sp,
            library_index: idx,
            placement: Placement {
                position: p.extend(soil.height_at(p)),
                yaw,
                scale: 1.0,
            },
            semantic_class: sp.semantic_class(),
            footprint_radius: plant.footprint_radius,
            stem_radius: stem_base_radius(plant),
            slot: None,
        });
    }
    for (k, inst) in instances.iter_mut().enumerate() {
        inst.id = u16::try_from(k + 1).map_err(|_| FieldError::InvalidRange {
            key: "extent",
            message: "more than 65535 plants in one field".into(),
        })?;
    }

    let debris_shapes = Arc::new(debris_shapes(cfg.debris.shapes.max(1), sub_seed(seed, "debris/shapes")));
    let scene = FieldScene {
        layout,
        soil,
        library,
        instances,
        dormant,
        debris_shapes,
        debris: Vec::new(),
        debris_density: 0.0,
    };
    let density = uniform(&mut substream(seed, "debris/density"), cfg.debris.density);
    Ok(scatter_debris(scene, density, &cfg.debris, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn layout_in_envelope() {
        let cfg = LayoutConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let l = sample_layout(&cfg, &mut rng).unwrap();
            assert!((0.38..=0.76).contains(&l.row_spacing));
            assert!((0.05..=0.10).contains(&l.plant_spacing));
            assert!((1..=10).contains(&l.weed_count));
        }
    }

    #[test]
    fn rejects_out_of_envelope() {
        let cfg = LayoutConfig {
            row_spacing: (0.2, 0.3),
            ..Default::default()
        };
        let e = cfg.validate().unwrap_err();
        assert!(e.to_string().contains("row_spacing"));
        assert!(e.to_string().contains("0.38"));
        let ok = LayoutConfig {
            allow_out_of_envelope: true,
            ..cfg
        };
        ok.validate().unwrap();
    }

    #[test]
    fn tiny_extent_is_an_error() {
        let cfg = LayoutConfig {
            extent: (0.2, 1.0),
            ..Default::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_layout(&cfg, &mut rng), Err(FieldError::ExtentTooSmall { .. })));
    }
}
