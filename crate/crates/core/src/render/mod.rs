//! Deterministic rendering of a field scene into aligned colour, semantic,
//! depth, normal and instance images.

mod camera;
mod raster;
mod sun;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use glam::{DMat3, DVec2, DVec3, Vec2, Vec3};
use image::{ImageBuffer, Luma, Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use camera::{sample_camera, CameraConfig, CameraSpec};
pub use sun::{parse_utc, sun_direction, utc, SunPosition, SunSpec};

use crate::field::{FieldScene, SoilPatch};
use crate::geom::{MaterialSlot, Mesh};
use crate::lsys::OrganLabel;
use crate::plants::SemanticClass;
use raster::{Fragment, Item, Surface};

pub type Gray16Image = ImageBuffer<Luma<u16>, Vec<u16>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("sun elevation {0:.2} deg is not above the horizon")]
    SunBelowHorizon(f64),
    #[error("camera at z = {z:.4} m is not above the soil surface at {ground:.4} m")]
    CameraBelowSoil { z: f64, ground: f64 },
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid date: {0}")]
    InvalidDate(String),
    #[error("invalid location: latitude {lat}, longitude {lon}")]
    InvalidLocation { lat: f64, lon: f64 },
    #[error("instance id {0} has no semantic class")]
    UnmappedId(u16),
    #[error("{0}")]
    Io(String),
}

pub const BACKGROUND_COLOR: [u8; 3] = [0, 0, 0];

/// Mask colour of a class; `None` is soil, debris and sky.
pub fn class_color(class: Option<SemanticClass>) -> [u8; 3] {
    match class {
        Some(SemanticClass::Crop) => [255, 0, 0],
        Some(SemanticClass::BroadleafWeed) => [0, 255, 0],
        Some(SemanticClass::GrassyWeed) => [0, 0, 255],
        None => BACKGROUND_COLOR,
    }
}

/// Inverse of [`class_color`]; `None` for colours outside the palette.
pub fn color_class(c: [u8; 3]) -> Option<Option<SemanticClass>> {
    match c {
        [0, 0, 0] => Some(None),
        [255, 0, 0] => Some(Some(SemanticClass::Crop)),
        [0, 255, 0] => Some(Some(SemanticClass::BroadleafWeed)),
        [0, 0, 255] => Some(Some(SemanticClass::GrassyWeed)),
        _ => None,
    }
}

/// Paints an instance-id buffer with the palette; id 0 is background.
pub fn encode_semantic_mask(
    ids: &Gray16Image,
    classes: &BTreeMap<u16, SemanticClass>,
) -> Result<RgbImage, RenderError> {
    let mut out = RgbImage::new(ids.width(), ids.height());
    for (o, id) in out.pixels_mut().zip(ids.pixels()) {
        let class = match id[0] {
            0 => None,
            i => Some(*classes.get(&i).ok_or(RenderError::UnmappedId(i))?),
        };
        *o = Rgb(class_color(class));
    }
    Ok(out)
}

pub fn encode_normal(n: Vec3) -> [u8; 3] {
    n.to_array().map(|v| (((v.clamp(-1.0, 1.0) + 1.0) * 0.5) * 255.0).round() as u8)
}

pub fn decode_normal(c: [u8; 3]) -> Vec3 {
    Vec3::from_array(c.map(|v| v as f32 / 255.0 * 2.0 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Rgb,
    Semantic,
    Depth,
    Normal,
    Instance,
}

impl Channel {
    pub const ALL: [Channel; 5] = [Channel::Rgb, Channel::Semantic, Channel::Depth, Channel::Normal, Channel::Instance];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Rgb => "rgb",
            Channel::Semantic => "semantic",
            Channel::Depth => "depth",
            Channel::Normal => "normal",
            Channel::Instance => "instance",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.png", self.name())
    }
}

impl std::str::FromStr for Channel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| format!("unknown channel `{s}`; expected rgb, semantic, depth, normal or instance"))
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutputs {
    pub rgb: RgbImage,
    pub semantic: RgbImage,
    /// View depth in millimetres; `far_mm` where no plant is visible.
    pub depth: Gray16Image,
    pub normal: RgbImage,
    pub instance: Gray16Image,
    pub far_mm: u16,
    pub classes: BTreeMap<u16, SemanticClass>,
}

impl RenderOutputs {
    pub fn dimensions(&self) -> (u32, u32) {
        self.rgb.dimensions()
    }

    /// Visible pixels per class, from the instance buffer.
    pub fn class_pixel_counts(&self) -> BTreeMap<SemanticClass, usize> {
        let mut m = BTreeMap::new();
        for p in self.instance.pixels() {
            if let Some(c) = self.classes.get(&p[0]) {
                *m.entry(*c).or_default() += 1;
            }
        }
        m
    }

    /// Writes the selected channels as PNG files into `dir`.
    pub fn save(&self, dir: &Path, channels: &[Channel]) -> Result<Vec<(Channel, PathBuf)>, RenderError> {
        std::fs::create_dir_all(dir).map_err(|e| RenderError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for &c in channels {
            let path = dir.join(c.file_name());
            let r = match c {
                Channel::Rgb => self.rgb.save(&path),
                Channel::Semantic => self.semantic.save(&path),
                Channel::Depth => self.depth.save(&path),
                Channel::Normal => self.normal.save(&path),
                Channel::Instance => self.instance.save(&path),
            };
            r.map_err(|e| RenderError::Io(format!("{}: {e}", path.display())))?;
            written.push((c, path));
        }
        Ok(written)
    }
}

/// Ground mesh sampled from the soil height field every `res` metres.
pub fn soil_mesh(soil: &SoilPatch, res: f64) -> Mesh {
    let size = soil.max - soil.min;
    let nx = (size.x / res).ceil() as usize + 1;
    let ny = (size.y / res).ceil() as usize + 1;
    let (dx, dy) = (size.x / (nx - 1) as f64, size.y / (ny - 1) as f64);
    let mut mesh = Mesh::new(OrganLabel::Stem, MaterialSlot::stem());
    let h = |i: usize, j: usize| soil.height_at(soil.min + DVec2::new(i as f64 * dx, j as f64 * dy));
    let heights: Vec<f64> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| h(i, j)).collect();
    let at = |i: usize, j: usize| heights[j * nx + i];
    for j in 0..ny {
        for i in 0..nx {
            let p = soil.min + DVec2::new(i as f64 * dx, j as f64 * dy);
            mesh.positions.push(p.extend(at(i, j)).as_vec3());
            let gx = (at((i + 1).min(nx - 1), j) - at(i.saturating_sub(1), j)) / (2.0 * dx);
            let gy = (at(i, (j + 1).min(ny - 1)) - at(i, j.saturating_sub(1))) / (2.0 * dy);
            mesh.normals.push(DVec3::new(-gx, -gy, 1.0).normalize().as_vec3());
            mesh.uvs.push(Vec2::ZERO);
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = |i: usize, j: usize| (j * nx + i) as u32;
            mesh.push_triangle([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            mesh.push_triangle([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    mesh
}

/// Ground mesh resolution, m.
pub const SOIL_MESH_RESOLUTION: f64 = 0.03;

fn sky(dir: DVec3) -> [f32; 3] {
    let e = dir.z as f32;
    if e < 0.0 {
        return [0.42, 0.36, 0.30];
    }
    let t = e.sqrt().min(1.0);
    let horizon = [0.78, 0.84, 0.90];
    let zenith = [0.32, 0.52, 0.84];
    [0, 1, 2].map(|k| horizon[k] + (zenith[k] - horizon[k]) * t)
}

/// Rasterizes the scene. Visibility, semantic, depth and instance values all
/// come from one z-buffer pass; alpha-masked leaf texels are discarded before
/// the depth test. Only plants write depth and instance ids.
pub fn render_scene(scene: &FieldScene, cam: &CameraSpec, sun: &SunSpec) -> Result<RenderOutputs, RenderError> {
    cam.validate()?;
    let pos = sun.position()?;
    if pos.elevation <= 0.0 {
        return Err(RenderError::SunBelowHorizon(pos.elevation));
    }
    let ground = scene.soil.height_at(cam.position.truncate());
    if cam.position.z <= ground {
        return Err(RenderError::CameraBelowSoil { z: cam.position.z, ground });
    }
    let light = pos.direction();
    let view = cam.view();
    let (w, h) = (cam.width, cam.height);

    let soil = soil_mesh(&scene.soil, SOIL_MESH_RESOLUTION);
    let mut items = vec![Item {
        mesh: &soil,
        rotation: DMat3::IDENTITY,
        translation: DVec3::ZERO,
        surface: Surface::Soil,
        atlas: None,
    }];
    for d in &scene.debris {
        let shape = &scene.debris_shapes[d.shape];
        items.push(Item {
            mesh: &shape.mesh,
            rotation: d.placement.matrix(),
            translation: d.placement.position,
            surface: Surface::Debris { color: shape.color },
            atlas: None,
        });
    }
    let mut classes = BTreeMap::new();
    for inst in &scene.instances {
        classes.insert(inst.id, inst.semantic_class);
        let plant = scene.assembly(inst);
        let atlas = scene.library.atlases.get(&inst.species);
        for m in &plant.meshes {
            items.push(Item {
                mesh: m,
                rotation: inst.placement.matrix(),
                translation: inst.placement.position,
                surface: Surface::Plant { id: inst.id },
                atlas,
            });
        }
    }

    let frags = raster::visibility(&items, &view, w, h, cam.near, cam.far);
    let far_mm = (cam.far * 1000.0).round().min(u16::MAX as f64) as u16;

    struct Px {
        rgb: [u8; 3],
        normal: [u8; 3],
        depth: u16,
        id: u16,
    }
    let shade = |i: usize, f: &Fragment| -> Px {
        let (x, y) = ((i as u32) % w, (i as u32) / w);
        if f.is_empty() {
            let c = sky(cam.ray(x, y));
            return Px {
                rgb: c.map(|v| (v * 255.0).round() as u8),
                normal: encode_normal(Vec3::ZERO),
                depth: far_mm,
                id: 0,
            };
        }
        let item = &items[f.item as usize];
        let mesh = item.mesh;
        let t = mesh.triangles[f.tri as usize];
        let wts = f.weights();
        let local: DVec3 = (0..3).map(|k| mesh.positions[t[k] as usize].as_dvec3() * wts[k] as f64).sum();
        let p = item.rotation * local + item.translation;
        let nl: DVec3 = (0..3).map(|k| mesh.normals[t[k] as usize].as_dvec3() * wts[k] as f64).sum();
        let mut n = (item.rotation * nl).normalize_or(DVec3::Z);
        if n.dot(cam.position - p) < 0.0 {
            n = -n;
        }
        let albedo = match item.surface {
            Surface::Soil => scene.soil.albedo_at(p.truncate()),
            Surface::Debris { color } => color,
            Surface::Plant { .. } => {
                let m = &mesh.material;
                let base = match (item.atlas, m.cell) {
                    (Some(a), Some(_)) => {
                        let uv: Vec2 = (0..3).map(|k| mesh.uvs[t[k] as usize] * wts[k]).sum();
                        a.diffuse_at(uv)
                    }
                    (Some(_), None) if m.kind == crate::geom::MaterialKind::Stem => [1.0; 3],
                    _ => [0.25, 0.5, 0.2],
                };
                [0, 1, 2].map(|k| base[k] * m.tint[k] * m.brightness)
            }
        };
        let lambert = n.dot(light).max(0.0);
        let e = (sun.ambient + lambert * sun.irradiance) as f32;
        let rgb = albedo.map(|a| ((a * e).clamp(0.0, 1.0) * 255.0).round() as u8);
        let (depth, id) = match item.surface {
            Surface::Plant { id, .. } => (((f.depth as f64 * 1000.0).floor() as u16).min(far_mm.saturating_sub(1)), id),
            _ => (far_mm, 0),
        };
        Px {
            rgb,
            normal: encode_normal(n.as_vec3()),
            depth,
            id,
        }
    };
    let px: Vec<Px> = frags.par_iter().enumerate().map(|(i, f)| shade(i, f)).collect();

    let mut rgb = RgbImage::new(w, h);
    let mut normal = RgbImage::new(w, h);
    let mut depth = Gray16Image::new(w, h);
    let mut instance = Gray16Image::new(w, h);
    for (i, p) in px.iter().enumerate() {
        let (x, y) = ((i as u32) % w, (i as u32) / w);
        rgb.put_pixel(x, y, Rgb(p.rgb));
        normal.put_pixel(x, y, Rgb(p.normal));
        depth.put_pixel(x, y, Luma([p.depth]));
        instance.put_pixel(x, y, Luma([p.id]));
    }
    let semantic = encode_semantic_mask(&instance, &classes)?;
    Ok(RenderOutputs {
        rgb,
        semantic,
        depth,
        normal,
        instance,
        far_mm,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_round_trip() {
        for c in [None, Some(SemanticClass::Crop), Some(SemanticClass::BroadleafWeed), Some(SemanticClass::GrassyWeed)] {
            assert_eq!(color_class(class_color(c)), Some(c));
        }
        assert_eq!(color_class([17, 0, 0]), None);
    }

    #[test]
    fn unmapped_id_is_an_error() {
        let mut ids = Gray16Image::new(2, 2);
        ids.put_pixel(1, 1, Luma([3]));
        assert_eq!(encode_semantic_mask(&ids, &BTreeMap::new()), Err(RenderError::UnmappedId(3)));
    }

    #[test]
    fn normal_encoding_round_trip() {
        for n in [Vec3::X, -Vec3::Y, Vec3::new(0.3, -0.5, 0.81).normalize()] {
            let d = decode_normal(encode_normal(n));
            assert!((d - n).abs().max_element() <= 1.0 / 255.0 + 1e-6);
        }
    }
}
