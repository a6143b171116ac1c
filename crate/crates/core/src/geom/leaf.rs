use glam::DVec3;

use super::sweep::{sweep_generalized_cylinder, CrossSection, PathSample, SweepOptions, Tessellation};
use super::{GeomError, MaterialSlot, Mesh, UvRect};
use crate::lsys::{FunctionCurve, OrganLabel};

/// Full description of a leaf blade in its local frame: the base sits at the
/// origin, the midrib starts along +X, the blade spans Y and faces +Z.
#[derive(Debug, Clone)]
pub struct LeafSpec {
    pub length: f64,
    pub width: f64,
    /// Multiplier of the half width against `s`.
    pub width_profile: FunctionCurve,
    /// Midrib angle below the starting direction, degrees, against `s`.
    pub bend: FunctionCurve,
    /// Twist rate, degrees per unit `s`.
    pub twist: FunctionCurve,
    pub section: CrossSection,
    /// Closedness at the end of `blend`; used for sheath-to-blade leaves.
    pub blade_closedness: Option<f64>,
    pub blend: (f64, f64),
    pub uv_cell: UvRect,
    pub label: OrganLabel,
    pub tessellation: Tessellation,
}

impl LeafSpec {
    pub fn new(length: f64, width: f64) -> Self {
        let tessellation = Tessellation::default();
        Self {
            length,
            width,
            width_profile: FunctionCurve::constant(1.0),
            bend: FunctionCurve::constant(0.0),
            twist: FunctionCurve::constant(0.0),
            section: CrossSection::blade(tessellation.section_points, 0.0),
            blade_closedness: None,
            blend: (0.0, 1.0),
            uv_cell: UvRect::UNIT,
            label: OrganLabel::Leaf,
            tessellation,
        }
    }

    /// Midrib polyline integrated from the bend angle profile.
    pub fn midrib(&self) -> Vec<DVec3> {
        let rings = self.tessellation.ring_count(self.length);
        let ds = self.length / (rings - 1) as f64;
        let dir = |s: f64| {
            let a = self.bend.eval(s).to_radians();
            DVec3::new(a.cos(), 0.0, -a.sin())
        };
        let mut pts = Vec::with_capacity(rings);
        let mut p = DVec3::ZERO;
        pts.push(p);
        for k in 1..rings {
            let s0 = (k - 1) as f64 / (rings - 1) as f64;
            let s1 = k as f64 / (rings - 1) as f64;
            let sm = 0.5 * (s0 + s1);
            // Simpson's rule on the unit tangent.
            let t = (dir(s0) + dir(sm) * 4.0 + dir(s1)) / 6.0;
            p += t * ds;
            pts.push(p);
        }
        pts
    }

    pub fn build(&self) -> Result<Mesh, GeomError> {
        if !(self.length > 0.0) || !(self.width > 0.0) {
            return Err(GeomError::NonPositiveSize {
                length: self.length,
                width: self.width,
            });
        }
        let half = self.width * 0.5;
        let pts = self.midrib();
        let last = (pts.len() - 1) as f64;
        let path: Vec<PathSample> = pts
            .into_iter()
            .enumerate()
            .map(|(i, p)| PathSample::new(p, half * self.width_profile.eval(i as f64 / last).max(1e-3)))
            .collect();
        let opts = SweepOptions {
            blade_closedness: self.blade_closedness,
            blend: self.blend,
            caps: false,
            initial_normal: Some(DVec3::Z),
            uv: self.uv_cell,
            label: self.label,
            material: MaterialSlot::leaf(),
        };
        sweep_generalized_cylinder(&path, &self.section, &self.twist, &FunctionCurve::constant(0.0), &opts)
    }
}

/// Builds a leaf mesh of the given size whose UVs cover `uv_cell`.
pub fn make_leaf_mesh(
    length: f64,
    width: f64,
    midrib_bend: &FunctionCurve,
    section: &CrossSection,
    uv_cell: UvRect,
) -> Result<Mesh, GeomError> {
    let mut spec = LeafSpec::new(length, width);
    spec.bend = midrib_bend.clone();
    spec.section = section.clone();
    spec.uv_cell = uv_cell;
    spec.build()
}
