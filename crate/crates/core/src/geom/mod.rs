//! Meshes and the procedures that build them: Bézier paths, generalized
//! cylinder sweeps, leaf blades, and secondary texture maps.

mod bezier;
mod leaf;
mod maps;
mod mesh;
mod obj;
mod sweep;

pub use bezier::{bezier_eval, bezier_length, bezier_samples, bezier_tangent};
pub use leaf::{make_leaf_mesh, LeafSpec};
pub use maps::{height_and_roughness_from_diffuse, luminance, normal_from_height, FloatImage, ROUGHNESS_FLOOR};
pub use mesh::{MaterialKind, MaterialSlot, Mesh, UvRect, MIN_TRIANGLE_AREA};
pub use obj::{write_obj, ObjObject};
pub use sweep::{cylinder, sweep_generalized_cylinder, CrossSection, PathSample, SweepOptions, Tessellation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("a Bézier curve needs 2 to 4 control points, got {0}")]
    ControlPointCount(usize),
    #[error("curve parameter {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("cross-section needs at least 3 points, got {0}")]
    SectionTooSmall(usize),
    #[error("closedness {0} is outside [0, 1]")]
    Closedness(f64),
    #[error("sweep path needs at least 2 samples, got {0}")]
    PathTooShort(usize),
    #[error("sweep radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("sweep path has zero length")]
    ZeroLengthPath,
    #[error("path tangent is undefined")]
    DegenerateFrame,
    #[error("leaf size must be positive, got {length} x {width}")]
    NonPositiveSize { length: f64, width: f64 },
    #[error("image is empty")]
    EmptyImage,
}
