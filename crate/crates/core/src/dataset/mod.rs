//! Batch generation: configuration, per-scene seeding, channel output and
//! the dataset manifest.

mod config;
mod manifest;
mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{Duration, NaiveTime, TimeZone, Utc};
use rand::Rng;
use rayon::prelude::*;

pub use config::{load_config, AssetConfig, GeneratorConfig, SunConfig};
pub use manifest::{ClassCounts, DatasetManifest, SceneRecord, SunRecord, MANIFEST_FILE, SCHEMA_VERSION};
pub use verify::{verify_dataset, VerifyReport, Violation, ViolationKind};

use crate::field::{compose_field, FieldError, FieldScene, PlantLibrary, SoilTextureSet};
use crate::plants::{PlantError, PlantParams, SemanticClass, Species, TextureAtlas};
use crate::render::{render_scene, sample_camera, sun_direction, RenderError, RenderOutputs, SunSpec};
use crate::seed::{scene_seed, sub_seed, substream};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("config: {0}")]
    Parse(String),
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("missing file {0}")]
    MissingFile(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl DatasetError {
    /// Process exit code: 1 for invalid input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            DatasetError::Io(_) | DatasetError::MissingFile(_) => 2,
            DatasetError::Field(FieldError::Io(_)) => 2,
            DatasetError::Plant(PlantError::Io { .. }) => 2,
            DatasetError::Render(RenderError::Io(_)) => 2,
            _ => 1,
        }
    }
}

/// Directory name of scene `i`.
pub fn scene_dir_name(i: usize) -> String {
    format!("scene_{i:06}")
}

/// Draws a location and local solar time, rejecting suns lower than the
/// configured elevation.
pub fn sample_sun<R: Rng + ?Sized>(cfg: &SunConfig, rng: &mut R) -> Result<SunSpec, DatasetError> {
    let (d0, d1) = cfg.date_range()?;
    let u = |rng: &mut R, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let days = (d1 - d0).num_days();
    for _ in 0..256 {
        let lat = u(rng, cfg.latitude);
        let lon = u(rng, cfg.longitude);
        let date = d0 + Duration::days(rng.random_range(0..=days));
        let hour = u(rng, cfg.solar_hour);
        let irradiance = u(rng, cfg.irradiance);
        let ambient = u(rng, cfg.ambient);
        // Local solar time to UTC, ignoring the equation of time.
        let secs = ((hour - lon / 15.0) * 3600.0).round() as i64;
        let midnight = Utc.from_utc_datetime(&date.and_time(NaiveTime::MIN));
        let time = midnight + Duration::seconds(secs);
        let pos = sun_direction(lat, lon, time)?;
        if pos.elevation >= cfg.min_elevation && pos.elevation > 0.0 {
            return Ok(SunSpec {
                latitude: lat,
                longitude: lon,
                time,
                irradiance,
                ambient,
            });
        }
    }
    Err(DatasetError::Config {
        key: "sun".into(),
        message: format!("no sampled sun reaches {} deg elevation", cfg.min_elevation),
    })
}

/// Shared, immutable inputs of every scene in a run.
pub struct RunAssets {
    pub library: Arc<PlantLibrary>,
    pub soil: Arc<SoilTextureSet>,
}

impl RunAssets {
    /// Loads external assets or synthesizes them, then grows the plant library.
    pub fn prepare(cfg: &GeneratorConfig) -> Result<Self, DatasetError> {
        let a = &cfg.assets;
        let params = match &a.plant_params {
            Some(d) => PlantParams::load_dir(d)?,
            None => PlantParams::default(),
        };
        let atlases: BTreeMap<Species, TextureAtlas> = match &a.atlases {
            Some(d) => Species::ALL
                .into_iter()
                .map(|sp| Ok((sp, TextureAtlas::load(&d.join(sp.name()))?)))
                .collect::<Result<_, PlantError>>()?,
            None => Species::ALL
                .into_iter()
                .map(|sp| {
                    let s = sub_seed(cfg.seed, &format!("atlas/{sp}"));
                    (sp, TextureAtlas::procedural(sp, s, 2, 4, a.atlas_cell_px))
                })
                .collect(),
        };
        let soil = match &a.soil {
            Some(d) => SoilTextureSet::load(d)?,
            None => SoilTextureSet::procedural(sub_seed(cfg.seed, "soil_textures"), a.soil_texture_px, a.soil_variants),
        };
        let library = PlantLibrary::generate(&params, atlases, &cfg.library, sub_seed(cfg.seed, "library"))?;
        Ok(Self {
            library: Arc::new(library),
            soil: Arc::new(soil),
        })
    }
}

/// Everything produced for one scene before it is written.
pub struct SceneOutput {
    pub scene: FieldScene,
    pub sun: SunSpec,
    pub outputs: RenderOutputs,
    pub record: SceneRecord,
}

/// Composes and renders scene `index`. Sub-streams are derived from the
/// scene seed by label, so the result does not depend on other scenes.
pub fn generate_scene(cfg: &GeneratorConfig, assets: &RunAssets, index: usize) -> Result<SceneOutput, DatasetError> {
    let seed = scene_seed(cfg.seed, index as u64);
    let scene = compose_field(&cfg.effective_field(), assets.library.clone(), assets.soil.clone(), seed)?;
    let camera = sample_camera(&cfg.camera, &scene, &mut substream(seed, "camera"));
    let sun = sample_sun(&cfg.sun, &mut substream(seed, "sun"))?;
    let outputs = render_scene(&scene, &camera, &sun)?;
    let pos = sun.position()?;

    let mut plant_counts = ClassCounts::default();
    let mut weed_species = BTreeMap::new();
    for inst in &scene.instances {
        plant_counts.add(inst.semantic_class, 1);
        if inst.semantic_class != SemanticClass::Crop {
            *weed_species.entry(inst.species).or_insert(0) += 1;
        }
    }
    let mut pixel_counts = ClassCounts::default();
    for (c, n) in outputs.class_pixel_counts() {
        pixel_counts.add(c, n);
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in outputs.instance.pixels() {
        if p[0] != 0 {
            seen.insert(p[0]);
        }
    }
    let mut visible_counts = ClassCounts::default();
    for id in seen {
        visible_counts.add(outputs.classes[&id], 1);
    }
    let id = scene_dir_name(index);
    let files = cfg
        .channels
        .iter()
        .map(|c| (*c, format!("{id}/{}", c.file_name())))
        .collect();
    let record = SceneRecord {
        id,
        index,
        seed,
        camera,
        sun: SunRecord {
            latitude: sun.latitude,
            longitude: sun.longitude,
            time: sun.time,
            azimuth: pos.azimuth,
            elevation: pos.elevation,
            irradiance: sun.irradiance,
            ambient: sun.ambient,
        },
        layout: scene.layout.clone(),
        plant_counts,
        dormant_count: scene.dormant.len(),
        weed_species,
        debris_count: scene.debris.len(),
        debris_density: scene.debris_density,
        soil_preset: scene.soil.preset.clone(),
        tire_track: scene.soil.tire_track.is_some(),
        instance_classes: outputs.classes.clone(),
        visible_counts,
        pixel_counts,
        files,
    };
    Ok(SceneOutput {
        scene,
        sun,
        outputs,
        record,
    })
}

fn write_scene(cfg: &GeneratorConfig, assets: &RunAssets, index: usize) -> Result<SceneRecord, DatasetError> {
    let out = generate_scene(cfg, assets, index)?;
    let dir = cfg.out.join(&out.record.id);
    if let Err(e) = out.outputs.save(&dir, &cfg.channels) {
        // Never leave a partially written scene behind.
        let _ = std::fs::remove_dir_all(&dir);
        return Err(DatasetError::Io(e.to_string()));
    }
    Ok(out.record)
}

/// Generates `cfg.count` scenes into `cfg.out` and writes the manifest.
/// Output bytes depend only on the configuration, not on `jobs`.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<DatasetManifest, DatasetError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| DatasetError::Io(format!("{}: {e}", cfg.out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| DatasetError::Io(format!("thread pool: {e}")))?;
    let scenes = pool.install(|| -> Result<Vec<SceneRecord>, DatasetError> {
        let assets = RunAssets::prepare(cfg)?;
        (0..cfg.count)
            .into_par_iter()
            .map(|i| write_scene(cfg, &assets, i))
            .collect()
    })?;
    let manifest = DatasetManifest {
        schema_version: SCHEMA_VERSION,
        generator: format!("soyfield {}", env!("CARGO_PKG_VERSION")),
        out_of_envelope: cfg.allow_out_of_envelope || cfg.field.layout.allow_out_of_envelope,
        config: cfg.clone(),
        scenes,
    };
    manifest.save(&manifest_path(&cfg.out))?;
    Ok(manifest)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.join(MANIFEST_FILE)
}
