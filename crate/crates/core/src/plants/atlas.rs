//! Leaf texture atlases: five aligned maps (diffuse, height, normal,
//! roughness, alpha) split into a grid of cells, one leaf texture per cell.

use std::path::Path;

use glam::Vec2;
use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PlantAssembly, PlantError, Species};
use crate::geom::{height_and_roughness_from_diffuse, normal_from_height, MaterialKind, UvRect};
use crate::noise::Perlin;

#[derive(Debug, Clone, PartialEq)]
pub struct TextureAtlas {
    pub species: Species,
    pub rows: u32,
    pub cols: u32,
    pub diffuse: RgbImage,
    pub height: GrayImage,
    pub normal: RgbImage,
    pub roughness: GrayImage,
    pub alpha: GrayImage,
    /// Albedo of stems and petioles.
    pub stem_color: [u8; 3],
}

/// On-disk description of an atlas (`atlas.toml`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasDescriptor {
    pub species: Species,
    pub rows: u32,
    pub cols: u32,
    pub diffuse: String,
    pub height: String,
    pub normal: String,
    pub roughness: String,
    pub alpha: String,
    pub stem_color: [u8; 3],
}

/// Ranges of the per-leaf material randomization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRanges {
    /// Shift toward yellow (positive) or blue (negative) as a channel gain.
    pub hue_shift: (f32, f32),
    pub brightness: (f32, f32),
}

impl Default for MaterialRanges {
    fn default() -> Self {
        Self {
            hue_shift: (-0.06, 0.06),
            brightness: (0.8, 1.2),
        }
    }
}

fn atlas_err(m: impl Into<String>) -> PlantError {
    PlantError::Atlas(m.into())
}

impl TextureAtlas {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        species: Species,
        rows: u32,
        cols: u32,
        diffuse: RgbImage,
        height: GrayImage,
        normal: RgbImage,
        roughness: GrayImage,
        alpha: GrayImage,
        stem_color: [u8; 3],
    ) -> Result<Self, PlantError> {
        if rows == 0 || cols == 0 {
            return Err(atlas_err("the cell grid needs at least one row and column"));
        }
        let dims = diffuse.dimensions();
        if dims.0 == 0 || dims.1 == 0 {
            return Err(atlas_err("maps are empty"));
        }
        for (name, d) in [
            ("height", height.dimensions()),
            ("normal", normal.dimensions()),
            ("roughness", roughness.dimensions()),
            ("alpha", alpha.dimensions()),
        ] {
            if d != dims {
                return Err(atlas_err(format!("{name} map is {}x{}, diffuse is {}x{}", d.0, d.1, dims.0, dims.1)));
            }
        }
        Ok(Self {
            species,
            rows,
            cols,
            diffuse,
            height,
            normal,
            roughness,
            alpha,
            stem_color,
        })
    }

    /// Builds the secondary maps from a diffuse map and alpha mask.
    pub fn from_diffuse(
        species: Species,
        rows: u32,
        cols: u32,
        diffuse: RgbImage,
        alpha: GrayImage,
        stem_color: [u8; 3],
    ) -> Result<Self, PlantError> {
        let (h, r) = height_and_roughness_from_diffuse(&diffuse)?;
        let normal = normal_from_height(&h, 4.0)?;
        Self::new(species, rows, cols, diffuse, h.to_gray8(), normal, r.to_gray8(), alpha, stem_color)
    }

    pub fn cell_count(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    pub fn cell_rect(&self, cell: usize) -> UvRect {
        let (r, c) = ((cell as u32 / self.cols) as f32, (cell as u32 % self.cols) as f32);
        let (w, h) = (1.0 / self.cols as f32, 1.0 / self.rows as f32);
        UvRect {
            min: [c * w, r * h],
            max: [(c + 1.0) * w, (r + 1.0) * h],
        }
    }

    fn texel(&self, uv: Vec2) -> (u32, u32) {
        let (w, h) = self.diffuse.dimensions();
        let x = ((uv.x * w as f32) as i64).clamp(0, w as i64 - 1) as u32;
        let y = ((uv.y * h as f32) as i64).clamp(0, h as i64 - 1) as u32;
        (x, y)
    }

    /// Nearest-texel alpha test.
    pub fn is_opaque(&self, uv: Vec2) -> bool {
        let (x, y) = self.texel(uv);
        self.alpha.get_pixel(x, y)[0] >= 128
    }

    /// Nearest-texel diffuse colour in [0, 1].
    pub fn diffuse_at(&self, uv: Vec2) -> [f32; 3] {
        let (x, y) = self.texel(uv);
        let p = self.diffuse.get_pixel(x, y).0;
        [p[0] as f32 / 255.0, p[1] as f32 / 255.0, p[2] as f32 / 255.0]
    }

    /// A synthetic atlas of `rows x cols` leaf textures, `cell_px` pixels per
    /// cell, with silhouettes and venation typical of the species.
    pub fn procedural(species: Species, seed: u64, rows: u32, cols: u32, cell_px: u32) -> Self {
        let mut rng = crate::seed::substream(seed, "atlas");
        let noise = Perlin::new(seed);
        let (w, h) = (cols * cell_px, rows * cell_px);
        let (base, stem_color): ([f32; 3], [u8; 3]) = match species {
            Species::Soybean => ([72.0, 118.0, 42.0], [96, 122, 58]),
            Species::GrassyWeed => ([92.0, 136.0, 54.0], [122, 142, 72]),
            Species::BroadleafWeed => ([58.0, 106.0, 46.0], [88, 108, 60]),
        };
        let cells: Vec<([f32; 3], f64)> = (0..rows * cols)
            .map(|_| {
                let tint = [
                    rng.random_range(0.85..1.15f32),
                    rng.random_range(0.9..1.1f32),
                    rng.random_range(0.8..1.2f32),
                ];
                (tint, rng.random_range(0.0..100.0))
            })
            .collect();
        let mut diffuse = RgbImage::new(w, h);
        let mut alpha = GrayImage::new(w, h);
        for y in 0..h {
            for x in 0..w {
                let cell = ((y / cell_px) * cols + x / cell_px) as usize;
                let u = ((x % cell_px) as f64 + 0.5) / cell_px as f64;
                let v = ((y % cell_px) as f64 + 0.5) / cell_px as f64;
                let across = (2.0 * u - 1.0).abs();
                let half = silhouette(species, v);
                let inside = across <= half;
                let (tint, offset) = cells[cell];
                let mut shade = 1.0;
                shade += 0.12 * noise.noise(glam::DVec2::new(u * 9.0 + offset, v * 9.0)) as f32;
                if across < 0.035 {
                    shade *= 1.18;
                }
                let vein = match species {
                    Species::GrassyWeed => ((across * 12.0).fract() < 0.12) as u8 as f32,
                    _ => ((v * 7.0 - across * 1.3).rem_euclid(1.0) < 0.07 && across > 0.05) as u8 as f32,
                };
                shade *= 1.0 + 0.1 * vein;
                if inside && half - across < 0.06 {
                    shade *= 0.85;
                }
                let px = [0, 1, 2].map(|k| (base[k] * tint[k] * shade).clamp(0.0, 255.0) as u8);
                diffuse.put_pixel(x, y, Rgb(px));
                alpha.put_pixel(x, y, Luma([if inside { 255 } else { 0 }]));
            }
        }
        Self::from_diffuse(species, rows, cols, diffuse, alpha, stem_color).expect("procedural maps are consistent")
    }

    pub fn descriptor(&self) -> AtlasDescriptor {
        AtlasDescriptor {
            species: self.species,
            rows: self.rows,
            cols: self.cols,
            diffuse: "diffuse.png".into(),
            height: "height.png".into(),
            normal: "normal.png".into(),
            roughness: "roughness.png".into(),
            alpha: "alpha.png".into(),
            stem_color: self.stem_color,
        }
    }

    /// Writes `atlas.toml` and the five maps into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), PlantError> {
        let io = |path: &Path, e: std::io::Error| PlantError::Io {
            path: path.display().to_string(),
            source: e,
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let d = self.descriptor();
        let save = |name: &str, r: Result<(), image::ImageError>| {
            r.map_err(|e| atlas_err(format!("writing {name}: {e}")))
        };
        save(&d.diffuse, self.diffuse.save(dir.join(&d.diffuse)))?;
        save(&d.height, self.height.save(dir.join(&d.height)))?;
        save(&d.normal, self.normal.save(dir.join(&d.normal)))?;
        save(&d.roughness, self.roughness.save(dir.join(&d.roughness)))?;
        save(&d.alpha, self.alpha.save(dir.join(&d.alpha)))?;
        let path = dir.join("atlas.toml");
        let text = toml::to_string(&d).expect("descriptor serialises");
        std::fs::write(&path, text).map_err(|e| io(&path, e))
    }

    /// Reads an atlas described by `dir/atlas.toml`.
    pub fn load(dir: &Path) -> Result<Self, PlantError> {
        let path = dir.join("atlas.toml");
        let text = std::fs::read_to_string(&path).map_err(|source| PlantError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let d: AtlasDescriptor = toml::from_str(&text).map_err(|e| atlas_err(format!("{}: {e}", path.display())))?;
        let open = |name: &str| {
            image::open(dir.join(name)).map_err(|e| atlas_err(format!("{}: {e}", dir.join(name).display())))
        };
        Self::new(
            d.species,
            d.rows,
            d.cols,
            open(&d.diffuse)?.to_rgb8(),
            open(&d.height)?.to_luma8(),
            open(&d.normal)?.to_rgb8(),
            open(&d.roughness)?.to_luma8(),
            open(&d.alpha)?.to_luma8(),
            d.stem_color,
        )
    }
}

/// Half width of the leaf silhouette (fraction of the cell) at `v` from base
/// to tip.
fn silhouette(species: Species, v: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match species {
        Species::Soybean => 0.95 * (pi * v.powf(0.75)).sin().max(0.0).powf(0.8),
        Species::BroadleafWeed => 0.95 * (pi * v).sin().max(0.0).powf(0.6),
        Species::GrassyWeed => {
            if v < 0.8 {
                0.9
            } else {
                0.9 * (1.0 - v) / 0.2
            }
        }
    }
}

/// Gives each leaf mesh a uniformly drawn atlas cell and randomized tint and
/// brightness; stems get the atlas stem colour. Leaf UVs are remapped from
/// their current cell (or the unit square) into the new cell.
pub fn assign_leaf_textures<R: Rng + ?Sized>(
    assembly: &PlantAssembly,
    atlas: &TextureAtlas,
    rng: &mut R,
    ranges: &MaterialRanges,
) -> Result<PlantAssembly, PlantError> {
    if atlas.species != assembly.species {
        return Err(PlantError::AtlasMismatch {
            atlas: atlas.species,
            plant: assembly.species,
        });
    }
    let draw = |rng: &mut R, (lo, hi): (f32, f32)| if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let mut out = assembly.clone();
    for mesh in &mut out.meshes {
        match mesh.material.kind {
            MaterialKind::Leaf => {
                let cell = rng.random_range(0..atlas.cell_count());
                let hue = draw(rng, ranges.hue_shift);
                let brightness = draw(rng, ranges.brightness);
                let old = mesh.material.cell.map_or(UvRect::UNIT, |c| atlas.cell_rect(c));
                let new = atlas.cell_rect(cell);
                for uv in &mut mesh.uvs {
                    let lu = (uv.x - old.min[0]) / (old.max[0] - old.min[0]);
                    let lv = (uv.y - old.min[1]) / (old.max[1] - old.min[1]);
                    *uv = new.map(lu, lv);
                }
                mesh.material.cell = Some(cell);
                mesh.material.tint = [1.0 + hue, 1.0, 1.0 - hue];
                mesh.material.brightness = brightness;
            }
            MaterialKind::Stem => {
                mesh.material.tint = atlas.stem_color.map(|c| c as f32 / 255.0);
                mesh.material.brightness = 1.0;
            }
        }
    }
    Ok(out)
}
