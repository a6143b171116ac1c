//! Soil: a displaced, texture-mapped ground plane tiled from photographed
//! (here: synthesized) patches without adjacent repeats.

use std::path::Path;
use std::sync::Arc;

use glam::DVec2;
use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FieldError;
use crate::noise::Fbm;
use crate::seed::{sub_seed, substream};

/// One soil texture set: albedo, displacement and roughness of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct SoilTexture {
    pub name: String,
    /// Soil condition the patch belongs to; a scene tiles one preset.
    pub preset: String,
    pub albedo: RgbImage,
    pub displacement: GrayImage,
    pub roughness: GrayImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoilTextureSet {
    pub patches: Vec<SoilTexture>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilPatchEntry {
    pub name: String,
    pub preset: String,
    pub albedo: String,
    pub displacement: String,
    pub roughness: String,
}

/// `soil.toml`: the list of patches in a soil texture directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilDescriptor {
    pub patch: Vec<SoilPatchEntry>,
}

pub const SOIL_PRESETS: [&str; 4] = ["dry_cracked", "crusted", "loam", "wet_mud"];

impl SoilTextureSet {
    /// Synthesizes `variants` patches of each preset, from dry, cracked
    /// ground to wet mud.
    pub fn procedural(seed: u64, px: u32, variants: usize) -> Self {
        let patches = SOIL_PRESETS
            .iter()
            .flat_map(|preset| {
                (0..variants).map(move |v| {
                    let name = format!("{preset}_{v}");
                    synth_patch(preset, &name, sub_seed(seed, &name), px)
                })
            })
            .collect();
        Self { patches }
    }

    /// Distinct presets in first-appearance order.
    pub fn presets(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patches {
            if !out.contains(&p.preset) {
                out.push(p.preset.clone());
            }
        }
        out
    }

    pub fn load(dir: &Path) -> Result<Self, FieldError> {
        let path = dir.join("soil.toml");
        let text = std::fs::read_to_string(&path).map_err(|e| FieldError::Io(format!("{}: {e}", path.display())))?;
        let d: SoilDescriptor =
            toml::from_str(&text).map_err(|e| FieldError::Soil(format!("{}: {e}", path.display())))?;
        let open = |name: &str| {
            image::open(dir.join(name)).map_err(|e| FieldError::Io(format!("{}: {e}", dir.join(name).display())))
        };
        let mut patches = Vec::new();
        for e in d.patch {
            let albedo = open(&e.albedo)?.to_rgb8();
            let displacement = open(&e.displacement)?.to_luma8();
            let roughness = open(&e.roughness)?.to_luma8();
            if albedo.dimensions() != displacement.dimensions() || albedo.dimensions() != roughness.dimensions() {
                return Err(FieldError::Soil(format!("patch `{}` maps differ in size", e.name)));
            }
            if albedo.width() == 0 || albedo.height() == 0 {
                return Err(FieldError::Soil(format!("patch `{}` is empty", e.name)));
            }
            patches.push(SoilTexture {
                name: e.name,
                preset: e.preset,
                albedo,
                displacement,
                roughness,
            });
        }
        Ok(Self { patches })
    }

    pub fn save(&self, dir: &Path) -> Result<(), FieldError> {
        std::fs::create_dir_all(dir).map_err(|e| FieldError::Io(format!("{}: {e}", dir.display())))?;
        let mut entries = Vec::new();
        for p in &self.patches {
            let e = SoilPatchEntry {
                name: p.name.clone(),
                preset: p.preset.clone(),
                albedo: format!("{}_albedo.png", p.name),
                displacement: format!("{}_displacement.png", p.name),
                roughness: format!("{}_roughness.png", p.name),
            };
            let w = |r: Result<(), image::ImageError>| r.map_err(|e| FieldError::Io(e.to_string()));
            w(p.albedo.save(dir.join(&e.albedo)))?;
            w(p.displacement.save(dir.join(&e.displacement)))?;
            w(p.roughness.save(dir.join(&e.roughness)))?;
            entries.push(e);
        }
        let text = toml::to_string(&SoilDescriptor { patch: entries }).expect("descriptor serialises");
        std::fs::write(dir.join("soil.toml"), text).map_err(|e| FieldError::Io(e.to_string()))
    }
}

fn synth_patch(preset: &str, name: &str, seed: u64, px: u32) -> SoilTexture {
    let noise = Fbm::new(4, 2.0, 0.5, seed).expect("octaves > 0");
    let mut rng = substream(seed, "cells");
    // Tileable Voronoi sites for cracks and clods.
    let sites: Vec<DVec2> = (0..14).map(|_| DVec2::new(rng.random(), rng.random())).collect();
    let tone: f32 = rng.random_range(0.9..1.1);
    let (base, crack_depth, relief, rough): ([f32; 3], f32, f32, f32) = match preset {
        "dry_cracked" => ([156.0, 128.0, 96.0], 0.7, 0.5, 0.9),
        "crusted" => ([138.0, 112.0, 86.0], 0.25, 0.4, 0.8),
        "loam" => ([112.0, 86.0, 62.0], 0.1, 0.7, 0.7),
        _ => ([78.0, 60.0, 46.0], 0.0, 0.25, 0.3),
    };
    let mut albedo = RgbImage::new(px, px);
    let mut displacement = GrayImage::new(px, px);
    let mut roughness = GrayImage::new(px, px);
    for y in 0..px {
        for x in 0..px {
            let p = DVec2::new(x as f64 / px as f64, y as f64 / px as f64);
            let (mut f1, mut f2) = (f64::MAX, f64::MAX);
            for s in &sites {
                let mut d = (*s - p).abs();
                d = d.min(DVec2::ONE - d);
                let dist = d.length();
                if dist < f1 {
                    f2 = f1;
                    f1 = dist;
                } else if dist < f2 {
                    f2 = dist;
                }
            }
            let crack = (1.0 - ((f2 - f1) / 0.025).min(1.0)) as f32 * crack_depth;
            // Periodic noise: sample on a torus so tiles wrap cleanly.
            let a = p * std::f64::consts::TAU;
            let q = DVec2::new(a.x.cos() * 0.8 + a.y.sin() * 0.3, a.y.cos() * 0.8 + a.x.sin() * 0.3) * 3.0;
            let n = noise.sample(q) as f32;
            let fine = noise.sample(q * 4.0 + 11.0) as f32;
            let height = (0.5 + relief * 0.5 * n + 0.1 * fine - 0.45 * crack).clamp(0.0, 1.0);
            let shade = ((0.85 + 0.25 * n + 0.08 * fine - 0.45 * crack) * tone).max(0.05);
            albedo.put_pixel(x, y, Rgb(base.map(|c| (c * shade).clamp(0.0, 255.0) as u8)));
            displacement.put_pixel(x, y, Luma([(height * 255.0) as u8]));
            roughness.put_pixel(x, y, Luma([((rough + 0.1 * fine).clamp(0.0, 1.0) * 255.0) as u8]));
        }
    }
    SoilTexture {
        name: name.to_string(),
        preset: preset.to_string(),
        albedo,
        displacement,
        roughness,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoilConfig {
    /// Edge of one texture tile, m.
    pub tile_size: f64,
    /// Ground beyond the planted extent on every side, m.
    pub margin: f64,
    /// Relief of a full-scale displacement value, m.
    pub displacement_scale: f64,
    /// Range of the moisture darkening amplitude.
    pub moisture_amplitude: (f64, f64),
    /// Range of the white-balance shift amplitude.
    pub color_temperature_amplitude: (f64, f64),
    /// Wavelength of the moisture and colour-temperature fields, m.
    pub variation_wavelength: f64,
    /// Fraction of a tile over which neighbouring tiles cross-fade.
    pub tile_blend: f64,
    pub tire_track_probability: f64,
    pub tire_track: TireTrackConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TireTrackConfig {
    pub gauge: f64,
    pub width: f64,
    pub depth: f64,
    pub ripple_period: f64,
}

impl Default for TireTrackConfig {
    fn default() -> Self {
        Self {
            gauge: 1.5,
            width: 0.3,
            depth: 0.012,
            ripple_period: 0.06,
        }
    }
}

impl Default for SoilConfig {
    fn default() -> Self {
        Self {
            tile_size: 0.5,
            margin: 1.5,
            displacement_scale: 0.01,
            moisture_amplitude: (0.0, 0.35),
            color_temperature_amplitude: (0.0, 0.1),
            variation_wavelength: 1.5,
            tile_blend: 0.15,
            tire_track_probability: 0.3,
            tire_track: TireTrackConfig::default(),
        }
    }
}

/// Texture patch and quarter-turn rotation of one tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileAssignment {
    pub patch: u16,
    pub rotation: u8,
}

/// Two parallel grooves along +Y, centred on `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TireTrack {
    pub x: f64,
    pub gauge: f64,
    pub width: f64,
    pub depth: f64,
    pub ripple_period: f64,
}

impl TireTrack {
    /// Downward displacement of the stamp at a point (≤ 0).
    pub fn offset(&self, p: DVec2) -> f64 {
        let mut z = 0.0;
        for line in [self.x - self.gauge * 0.5, self.x + self.gauge * 0.5] {
            let d = (p.x - line).abs() / (self.width * 0.5);
            if d < 1.0 {
                let profile = 0.5 * (1.0 + (std::f64::consts::PI * d).cos());
                let tread = 0.75 + 0.25 * (std::f64::consts::TAU * p.y / self.ripple_period).sin();
                z -= self.depth * profile * tread;
            }
        }
        z
    }
}

#[derive(Debug, Clone)]
pub struct SoilPatch {
    pub preset: String,
    pub min: DVec2,
    pub max: DVec2,
    pub tile_size: f64,
    pub tiles_x: usize,
    pub tiles_y: usize,
    /// Row-major tile grid; patch ids index the texture set.
    pub tiles: Vec<TileAssignment>,
    /// Fraction of a tile over which neighbouring tiles cross-fade.
    pub blend: f64,
    pub displacement_scale: f64,
    pub moisture_amplitude: f64,
    pub color_temperature_amplitude: f64,
    pub variation_wavelength: f64,
    pub tire_track: Option<TireTrack>,
    moisture: Fbm,
    color_temperature: Fbm,
    pub textures: Arc<SoilTextureSet>,
}

impl PartialEq for SoilPatch {
    fn eq(&self, o: &Self) -> bool {
        self.preset == o.preset
            && self.min == o.min
            && self.max == o.max
            && self.tile_size == o.tile_size
            && self.tiles == o.tiles
            && self.moisture_amplitude == o.moisture_amplitude
            && self.color_temperature_amplitude == o.color_temperature_amplitude
            && self.tire_track == o.tire_track
            && self.textures == o.textures
    }
}

/// Greedy row-major tiling: each tile draws uniformly among the
/// (patch, rotation) pairs not used by its left and upper neighbours.
pub fn tile_soil<R: Rng + ?Sized>(
    tiles_x: usize,
    tiles_y: usize,
    patches: usize,
    rng: &mut R,
) -> Result<Vec<TileAssignment>, FieldError> {
    if patches < 2 {
        return Err(FieldError::NotEnoughPatches(patches));
    }
    let all: Vec<TileAssignment> = (0..patches as u16)
        .flat_map(|patch| (0..4u8).map(move |rotation| TileAssignment { patch, rotation }))
        .collect();
    let mut tiles: Vec<TileAssignment> = Vec::with_capacity(tiles_x * tiles_y);
    for j in 0..tiles_y {
        for i in 0..tiles_x {
            let left = (i > 0).then(|| tiles[j * tiles_x + i - 1]);
            let up = (j > 0).then(|| tiles[(j - 1) * tiles_x + i]);
            let options: Vec<TileAssignment> = all
                .iter()
                .copied()
                .filter(|t| Some(*t) != left && Some(*t) != up)
                .collect();
            tiles.push(options[rng.random_range(0..options.len())]);
        }
    }
    Ok(tiles)
}

/// Edge-adjacent tile pairs that share (patch, rotation).
pub fn adjacent_repeats(tiles: &[TileAssignment], tiles_x: usize, tiles_y: usize) -> usize {
    let mut n = 0;
    for j in 0..tiles_y {
        for i in 0..tiles_x {
            let t = tiles[j * tiles_x + i];
            if i + 1 < tiles_x && tiles[j * tiles_x + i + 1] == t {
                n += 1;
            }
            if j + 1 < tiles_y && tiles[(j + 1) * tiles_x + i] == t {
                n += 1;
            }
        }
    }
    n
}

/// Builds the soil of the rectangle `[min, max]`.
pub fn synthesize_soil(
    min: DVec2,
    max: DVec2,
    textures: Arc<SoilTextureSet>,
    cfg: &SoilConfig,
    seed: u64,
) -> Result<SoilPatch, FieldError> {
    let mut rng = substream(seed, "soil");
    let size = max - min;
    let tiles_x = ((size.x / cfg.tile_size).ceil() as usize).max(1);
    let tiles_y = ((size.y / cfg.tile_size).ceil() as usize).max(1);
    if textures.patches.len() < 2 {
        return Err(FieldError::NotEnoughPatches(textures.patches.len()));
    }
    let presets = textures.presets();
    let preset = presets[rng.random_range(0..presets.len())].clone();
    let mut pool: Vec<u16> = (0..textures.patches.len() as u16)
        .filter(|&i| textures.patches[i as usize].preset == preset)
        .collect();
    if pool.len() < 2 {
        pool = (0..textures.patches.len() as u16).collect();
    }
    let tiles = tile_soil(tiles_x, tiles_y, pool.len(), &mut rng)?
        .into_iter()
        .map(|t| TileAssignment {
            patch: pool[t.patch as usize],
            rotation: t.rotation,
        })
        .collect();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let moisture_amplitude = draw(&mut rng, cfg.moisture_amplitude);
    let color_temperature_amplitude = draw(&mut rng, cfg.color_temperature_amplitude);
    let tire_track = (rng.random::<f64>() < cfg.tire_track_probability).then(|| TireTrack {
        x: rng.random_range(min.x..=max.x),
        gauge: cfg.tire_track.gauge,
        width: cfg.tire_track.width,
        depth: cfg.tire_track.depth,
        ripple_period: cfg.tire_track.ripple_period,
    });
    Ok(SoilPatch {
        preset,
        min,
        max,
        tile_size: cfg.tile_size,
        tiles_x,
        tiles_y,
        tiles,
        blend: cfg.tile_blend,
        displacement_scale: cfg.displacement_scale,
        moisture_amplitude,
        color_temperature_amplitude,
        variation_wavelength: cfg.variation_wavelength,
        tire_track,
        moisture: Fbm::new(3, 2.0, 0.5, sub_seed(seed, "moisture")).expect("octaves > 0"),
        color_temperature: Fbm::new(2, 2.0, 0.5, sub_seed(seed, "color_temperature")).expect("octaves > 0"),
        textures,
    })
}

impl SoilPatch {
    /// Tiles contributing at a point with their weights and the point's
    /// texture coordinates in each (after the tile's rotation). Weights of
    /// neighbours rise from 0 to 1/2 towards a shared edge.
    fn taps(&self, p: DVec2) -> impl Iterator<Item = (f64, TileAssignment, DVec2)> + '_ {
        let q = (p - self.min) / self.tile_size;
        let i = (q.x.floor() as i64).clamp(0, self.tiles_x as i64 - 1);
        let j = (q.y.floor() as i64).clamp(0, self.tiles_y as i64 - 1);
        let axis = |f: f64, k: i64, n: usize| -> [(i64, f64); 2] {
            let b = self.blend;
            let (nb, w) = if b > 0.0 && f < b {
                (k - 1, 0.5 - 0.5 * f / b)
            } else if b > 0.0 && f > 1.0 - b {
                (k + 1, 0.5 - 0.5 * (1.0 - f) / b)
            } else {
                (k, 0.0)
            };
            if nb < 0 || nb >= n as i64 {
                [(k, 1.0), (k, 0.0)]
            } else {
                [(k, 1.0 - w), (nb, w)]
            }
        };
        let ax = axis(q.x - i as f64, i, self.tiles_x);
        let ay = axis(q.y - j as f64, j, self.tiles_y);
        ay.into_iter()
            .flat_map(move |(tj, wy)| ax.into_iter().map(move |(ti, wx)| (ti, tj, wx * wy)))
            .filter(|t| t.2 > 0.0)
            .map(move |(ti, tj, w)| {
                let t = self.tiles[tj as usize * self.tiles_x + ti as usize];
                let (u, v) = (q.x - ti as f64, q.y - tj as f64);
                let uv = match t.rotation {
                    0 => DVec2::new(u, v),
                    1 => DVec2::new(v, 1.0 - u),
                    2 => DVec2::new(1.0 - u, 1.0 - v),
                    _ => DVec2::new(1.0 - v, u),
                };
                (w, t, uv)
            })
    }

    fn sample_gray(img: &GrayImage, uv: DVec2) -> f64 {
        let (w, h) = img.dimensions();
        let x = uv.x * w as f64 - 0.5;
        let y = uv.y * h as f64 - 0.5;
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let at = |xi: f64, yi: f64| {
            let xi = (xi as i64).rem_euclid(w as i64) as u32;
            let yi = (yi as i64).rem_euclid(h as i64) as u32;
            img.get_pixel(xi, yi)[0] as f64 / 255.0
        };
        let a = at(x0, y0) * (1.0 - fx) + at(x0 + 1.0, y0) * fx;
        let b = at(x0, y0 + 1.0) * (1.0 - fx) + at(x0 + 1.0, y0 + 1.0) * fx;
        a * (1.0 - fy) + b * fy
    }

    /// Surface height at a point, m: texture displacement plus tire tracks.
    pub fn height_at(&self, p: DVec2) -> f64 {
        let d: f64 = self
            .taps(p)
            .map(|(w, t, uv)| w * Self::sample_gray(&self.textures.patches[t.patch as usize].displacement, uv))
            .sum();
        d * self.displacement_scale + self.tire_track.map_or(0.0, |tt| tt.offset(p))
    }

    /// Highest possible surface point.
    pub fn max_height(&self) -> f64 {
        self.displacement_scale
    }

    /// Albedo darkening from moisture; exactly 1 when the amplitude is 0.
    pub fn moisture_multiplier(&self, p: DVec2) -> f64 {
        if self.moisture_amplitude == 0.0 {
            return 1.0;
        }
        let n = self.moisture.sample(p / self.variation_wavelength);
        1.0 - self.moisture_amplitude * (0.5 + 0.5 * n)
    }

    /// Per-channel white-balance gains; warmer where positive.
    pub fn color_temperature_gains(&self, p: DVec2) -> [f64; 3] {
        let t = self.color_temperature_amplitude * self.color_temperature.sample(p / self.variation_wavelength + 17.0);
        [1.0 + t, 1.0, 1.0 - t]
    }

    pub fn albedo_at(&self, p: DVec2) -> [f32; 3] {
        let mut c = [0.0f64; 3];
        for (w, t, uv) in self.taps(p) {
            let img = &self.textures.patches[t.patch as usize].albedo;
            let (iw, ih) = img.dimensions();
            let x = ((uv.x * iw as f64).floor() as i64).rem_euclid(iw as i64) as u32;
            let y = ((uv.y * ih as f64).floor() as i64).rem_euclid(ih as i64) as u32;
            let px = img.get_pixel(x, y).0;
            for k in 0..3 {
                c[k] += w * px[k] as f64 / 255.0;
            }
        }
        let m = self.moisture_multiplier(p);
        let g = self.color_temperature_gains(p);
        [0, 1, 2].map(|k| (c[k] * m * g[k]).clamp(0.0, 1.0) as f32)
    }

    pub fn roughness_at(&self, p: DVec2) -> f64 {
        self.taps(p)
            .map(|(w, t, uv)| w * Self::sample_gray(&self.textures.patches[t.patch as usize].roughness, uv))
            .sum()
    }

    /// Displacement over the whole patch at `res` samples per metre.
    pub fn displacement_image(&self, res: f64) -> crate::geom::FloatImage {
        let size = self.max - self.min;
        let w = ((size.x * res).ceil() as u32).max(1);
        let h = ((size.y * res).ceil() as u32).max(1);
        crate::geom::FloatImage::from_fn(w, h, |x, y| {
            let p = self.min + DVec2::new((x as f64 + 0.5) / res, (y as f64 + 0.5) / res);
            self.height_at(p) as f32
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_patches_tile_without_repeats() {
        let mut rng = substream(4, "t");
        for (w, h) in [(1, 1), (2, 7), (9, 9)] {
            let t = tile_soil(w, h, 2, &mut rng).unwrap();
            assert_eq!(adjacent_repeats(&t, w, h), 0);
        }
        assert!(matches!(tile_soil(3, 3, 1, &mut rng), Err(FieldError::NotEnoughPatches(1))));
    }

    #[test]
    fn zero_moisture_is_identity() {
        let tex = Arc::new(SoilTextureSet::procedural(1, 16, 2));
        let cfg = SoilConfig {
            moisture_amplitude: (0.0, 0.0),
            ..Default::default()
        };
        let s = synthesize_soil(DVec2::splat(-1.0), DVec2::splat(1.0), tex, &cfg, 5).unwrap();
        for k in 0..50 {
            let p = DVec2::new(k as f64 * 0.037 - 0.9, 0.5 - k as f64 * 0.02);
            assert_eq!(s.moisture_multiplier(p), 1.0);
        }
    }

    #[test]
    fn tire_track_lowers_ground() {
        let t = TireTrack {
            x: 0.0,
            gauge: 1.5,
            width: 0.3,
            depth: 0.01,
            ripple_period: 0.06,
        };
        assert!(t.offset(DVec2::new(0.75, 0.0)) < -0.005);
        assert_eq!(t.offset(DVec2::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let set = SoilTextureSet::procedural(2, 8, 2);
        set.save(dir.path()).unwrap();
        assert_eq!(SoilTextureSet::load(dir.path()).unwrap(), set);
    }
}
