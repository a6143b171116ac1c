//! Species generators (soybean, grassy weed, broadleaf weed) and per-leaf
//! material assignment from texture atlases.

mod atlas;
mod broadleaf;
mod grassy;
mod params;
mod soybean;
mod turtle_mesh;

use glam::{DVec3, Vec3};
use serde::{Deserialize, Serialize};

use crate::geom::{GeomError, MaterialKind, Mesh};
use crate::lsys::LsysError;

pub use atlas::{assign_leaf_textures, AtlasDescriptor, MaterialRanges, TextureAtlas};
pub use broadleaf::grow_broadleaf_weed;
pub use grassy::grow_grassy_weed;
pub use params::{LeafShape, LsysSpeciesParams, PlantParams, SoybeanParams};
pub use soybean::{grow_soybean, SoybeanSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Soybean,
    GrassyWeed,
    BroadleafWeed,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::Soybean, Species::GrassyWeed, Species::BroadleafWeed];

    pub fn name(self) -> &'static str {
        match self {
            Species::Soybean => "soybean",
            Species::GrassyWeed => "grassy_weed",
            Species::BroadleafWeed => "broadleaf_weed",
        }
    }

    pub fn semantic_class(self) -> SemanticClass {
        match self {
            Species::Soybean => SemanticClass::Crop,
            Species::GrassyWeed => SemanticClass::GrassyWeed,
            Species::BroadleafWeed => SemanticClass::BroadleafWeed,
        }
    }
}

impl std::str::FromStr for Species {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Species::ALL
            .into_iter()
            .find(|sp| sp.name() == s)
            .ok_or_else(|| format!("unknown species `{s}` (expected soybean, grassy_weed or broadleaf_weed)"))
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticClass {
    Crop,
    BroadleafWeed,
    GrassyWeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafKind {
    Cotyledon,
    Unifoliate,
    Trifoliate,
    Blade,
}

/// A leaf (or compound leaf) and where it sits on the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafInfo {
    pub kind: LeafKind,
    /// Stem node the leaf is attached to.
    pub node: DVec3,
    /// Initial direction of the leaf (or petiole) away from the node.
    pub direction: DVec3,
    /// Azimuth of `direction` in the plant frame, degrees from +X toward +Y.
    pub azimuth_deg: f64,
    pub length: f64,
    pub width: f64,
    pub age: f64,
    pub opened: bool,
    /// Indices into `PlantAssembly::meshes` of the leaf's blades.
    pub meshes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchInfo {
    pub origin: DVec3,
    pub length: f64,
    pub order: usize,
    pub meshes: Vec<usize>,
}

/// Organ-labelled meshes of one plant in its local frame (base at the
/// origin, +Z up).
#[derive(Debug, Clone, PartialEq)]
pub struct PlantAssembly {
    pub species: Species,
    pub age: f64,
    pub seed: u64,
    pub meshes: Vec<Mesh>,
    /// Plant height, m: the main-stem apex for soybean, the highest vertex
    /// for the weeds.
    pub height: f64,
    pub leaf_count: usize,
    pub semantic_class: SemanticClass,
    pub leaves: Vec<LeafInfo>,
    pub branches: Vec<BranchInfo>,
    /// Largest horizontal distance of any vertex from the base, m.
    pub footprint_radius: f64,
}

impl PlantAssembly {
    pub(crate) fn new(species: Species, age: f64, seed: u64) -> Self {
        Self {
            species,
            age,
            seed,
            meshes: Vec::new(),
            height: 0.0,
            leaf_count: 0,
            semantic_class: species.semantic_class(),
            leaves: Vec::new(),
            branches: Vec::new(),
            footprint_radius: 0.0,
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.footprint_radius = self
            .meshes
            .iter()
            .flat_map(|m| m.positions.iter())
            .map(|p| (p.x as f64).hypot(p.y as f64))
            .fold(0.0, f64::max);
        self
    }

    pub fn triangle_count(&self) -> usize {
        self.meshes.iter().map(|m| m.triangles.len()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.meshes.iter().map(|m| m.vertex_count()).sum()
    }

    pub fn leaf_meshes(&self) -> impl Iterator<Item = &Mesh> {
        self.meshes.iter().filter(|m| m.material.kind == MaterialKind::Leaf)
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        self.meshes
            .iter()
            .filter_map(|m| m.bounds())
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    /// Order-sensitive 64-bit digest of all geometry and materials.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        h.write(self.species.name().as_bytes());
        h.write(&self.age.to_le_bytes());
        h.write(&self.height.to_le_bytes());
        for m in &self.meshes {
            for p in m.positions.iter().chain(&m.normals) {
                for c in p.to_array() {
                    h.write(&c.to_le_bytes());
                }
            }
            for uv in &m.uvs {
                h.write(&uv.x.to_le_bytes());
                h.write(&uv.y.to_le_bytes());
            }
            for t in &m.triangles {
                for i in t {
                    h.write(&i.to_le_bytes());
                }
            }
            h.write(&[m.material.kind as u8, m.material.cell.map_or(255, |c| c as u8)]);
            for c in m.material.tint {
                h.write(&c.to_le_bytes());
            }
            h.write(&m.material.brightness.to_le_bytes());
        }
        h.0
    }
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlantError {
    #[error("{species} age {age} days is outside the modelled window [{min}, {max}]")]
    AgeOutOfWindow { species: Species, age: f64, min: f64, max: f64 },
    #[error("grammar: {0}")]
    Lsys(#[from] LsysError),
    #[error("geometry: {0}")]
    Geom(#[from] GeomError),
    #[error("parameter `{key}`: {message}")]
    Params { key: String, message: String },
    #[error("atlas is for {atlas}, plant is {plant}")]
    AtlasMismatch { atlas: Species, plant: Species },
    #[error("atlas: {0}")]
    Atlas(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Grows a plant of any species with its parameters from `params`.
pub fn grow(species: Species, age: f64, seed: u64, params: &PlantParams) -> Result<PlantAssembly, PlantError> {
    match species {
        Species::Soybean => grow_soybean(age, seed, &params.soybean),
        Species::GrassyWeed => grow_grassy_weed(age, seed, &params.grassy_weed),
        Species::BroadleafWeed => grow_broadleaf_weed(age, seed, &params.broadleaf_weed),
    }
}

/// Azimuth of a direction's horizontal component, degrees in (-180, 180].
pub fn azimuth_deg(d: DVec3) -> f64 {
    d.y.atan2(d.x).to_degrees()
}
