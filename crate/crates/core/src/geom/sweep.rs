//! Generalized-cylinder sweeps.
//!
//! A cross-section is instanced at every path sample in a parallel-transport
//! frame, scaled by the sample radius, twisted around the tangent and
//! inclined around the side axis. The section's closedness blends between
//! its own open polyline and a closed unit ring; when closedness is 1 along
//! the whole path the ring is welded and can be capped.

use std::f64::consts::PI;

use glam::{DVec2, DVec3};

use super::{GeomError, Mesh, MaterialSlot, UvRect};
use crate::lsys::{FunctionCurve, OrganLabel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub position: DVec3,
    pub radius: f64,
}

impl PathSample {
    pub fn new(position: DVec3, radius: f64) -> Self {
        Self { position, radius }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    points: Vec<DVec2>,
    closedness: f64,
}

impl CrossSection {
    pub fn new(points: Vec<DVec2>, closedness: f64) -> Result<Self, GeomError> {
        if points.len() < 3 {
            return Err(GeomError::SectionTooSmall(points.len()));
        }
        if !(0.0..=1.0).contains(&closedness) {
            return Err(GeomError::Closedness(closedness));
        }
        Ok(Self { points, closedness })
    }

    /// Closed unit circle with `n` points.
    pub fn circle(n: usize) -> Self {
        let n = n.max(3);
        let points = (0..n).map(|j| ring_point(j, n)).collect();
        Self { points, closedness: 1.0 }
    }

    /// Open blade across `x ∈ [-1, 1]` whose edges rise by `cup`.
    pub fn blade(n: usize, cup: f64) -> Self {
        let n = n.max(3);
        let points = (0..n)
            .map(|j| {
                let x = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                DVec2::new(x, cup * x * x)
            })
            .collect();
        Self { points, closedness: 0.0 }
    }

    /// Open section sampled from a profile curve `y(x)` over `x ∈ [-1, 1]`.
    pub fn from_curve(curve: &FunctionCurve, n: usize) -> Self {
        let n = n.max(3);
        let points = (0..n)
            .map(|j| {
                let x = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                DVec2::new(x, curve.eval(x))
            })
            .collect();
        Self { points, closedness: 0.0 }
    }

    pub fn with_closedness(mut self, closedness: f64) -> Result<Self, GeomError> {
        if !(0.0..=1.0).contains(&closedness) {
            return Err(GeomError::Closedness(closedness));
        }
        self.closedness = closedness;
        Ok(self)
    }

    pub fn points(&self) -> &[DVec2] {
        &self.points
    }

    pub fn closedness(&self) -> f64 {
        self.closedness
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Point `j` of a ring split into `divisions` steps, starting and ending at
/// the top with the middle of the section at the bottom.
fn ring_point(j: usize, divisions: usize) -> DVec2 {
    let phi = -PI + 2.0 * PI * j as f64 / divisions as f64;
    DVec2::new(phi.sin(), -phi.cos())
}

/// Ring samples per centimetre of path and points per cross-section.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tessellation {
    pub rings_per_cm: f64,
    pub section_points: usize,
}

impl Default for Tessellation {
    fn default() -> Self {
        Self {
            rings_per_cm: 8.0,
            section_points: 12,
        }
    }
}

impl Tessellation {
    pub fn ring_count(&self, length_m: f64) -> usize {
        ((length_m * 100.0 * self.rings_per_cm).ceil() as usize + 1).max(2)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Closedness reached at the end of the blend span; `None` keeps the
    /// section's closedness along the whole path.
    pub blade_closedness: Option<f64>,
    /// Normalised arc-length span over which closedness is blended.
    pub blend: (f64, f64),
    pub caps: bool,
    /// Preferred direction of the section's `y` axis at the first sample.
    pub initial_normal: Option<DVec3>,
    pub uv: UvRect,
    pub label: OrganLabel,
    pub material: MaterialSlot,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            blade_closedness: None,
            blend: (0.0, 1.0),
            caps: false,
            initial_normal: None,
            uv: UvRect::UNIT,
            label: OrganLabel::Stem,
            material: MaterialSlot::stem(),
        }
    }
}

/// Sweeps `section` along `path`.
///
/// `twist` gives the twist rate in degrees per unit of normalised arc length
/// `s ∈ [0, 1]`; the applied angle is its integral from 0 to `s`. `bend`
/// gives the inclination of the section plane in degrees at `s`.
pub fn sweep_generalized_cylinder(
    path: &[PathSample],
    section: &CrossSection,
    twist: &FunctionCurve,
    bend: &FunctionCurve,
    opts: &SweepOptions,
) -> Result<Mesh, GeomError> {
    if path.len() < 2 {
        return Err(GeomError::PathTooShort(path.len()));
    }
    if let Some(r) = path.iter().map(|p| p.radius).find(|r| !(*r > 0.0)) {
        return Err(GeomError::NonPositiveRadius(r));
    }
    let mut arc = Vec::with_capacity(path.len());
    arc.push(0.0);
    for w in path.windows(2) {
        let d = w[0].position.distance(w[1].position);
        arc.push(arc.last().unwrap() + d);
    }
    let total = *arc.last().unwrap();
    if !(total > 1e-12) {
        return Err(GeomError::ZeroLengthPath);
    }
    if path
        .windows(2)
        .any(|w| w[0].position.distance(w[1].position) <= 1e-12)
    {
        return Err(GeomError::DegenerateFrame);
    }
    let n = path.len();
    let s: Vec<f64> = arc.iter().map(|a| a / total).collect();

    let tangents: Vec<DVec3> = (0..n)
        .map(|i| {
            let a = path[i.saturating_sub(1)].position;
            let b = path[(i + 1).min(n - 1)].position;
            b - a
        })
        .map(|t| t.try_normalize().ok_or(GeomError::DegenerateFrame))
        .collect::<Result<_, _>>()?;

    // Parallel transport of the normal along the path.
    let mut normals = Vec::with_capacity(n);
    let t0 = tangents[0];
    let seed = opts
        .initial_normal
        .and_then(|v| (v - t0 * v.dot(t0)).try_normalize())
        .unwrap_or_else(|| {
            let axis = if t0.x.abs() < 0.9 { DVec3::X } else { DVec3::Y };
            (axis - t0 * axis.dot(t0)).normalize()
        });
    normals.push(seed);
    for i in 1..n {
        let prev = normals[i - 1];
        let (ta, tb) = (tangents[i - 1], tangents[i]);
        let axis = ta.cross(tb);
        let rotated = if axis.length() < 1e-12 {
            prev
        } else {
            let angle = ta.dot(tb).clamp(-1.0, 1.0).acos();
            rotate(prev, axis.normalize(), angle)
        };
        let n_i = (rotated - tb * rotated.dot(tb))
            .try_normalize()
            .ok_or(GeomError::DegenerateFrame)?;
        normals.push(n_i);
    }

    // Accumulated twist (trapezoid rule over the samples).
    let mut twist_deg = vec![0.0; n];
    for i in 1..n {
        twist_deg[i] = twist_deg[i - 1] + 0.5 * (twist.eval(s[i - 1]) + twist.eval(s[i])) * (s[i] - s[i - 1]);
    }

    let closedness: Vec<f64> = s
        .iter()
        .map(|&si| match opts.blade_closedness {
            None => section.closedness,
            Some(end) => {
                let (b0, b1) = opts.blend;
                let t = if b1 > b0 { ((si - b0) / (b1 - b0)).clamp(0.0, 1.0) } else if si >= b0 { 1.0 } else { 0.0 };
                section.closedness + (end - section.closedness) * t
            }
        })
        .collect();
    let welded = closedness.iter().all(|&c| c >= 1.0 - 1e-12);
    let m = section.points.len();
    let divisions = if welded { m } else { m - 1 };

    let mut mesh = Mesh::new(opts.label, opts.material);
    let mut fallback = Vec::with_capacity(n * m + 2);
    for i in 0..n {
        let t = tangents[i];
        let nrm = normals[i];
        let side = nrm.cross(t);
        let (st, ct) = twist_deg[i].to_radians().sin_cos();
        let side_t = side * ct + nrm * st;
        let nrm_t = nrm * ct - side * st;
        let (sb, cb) = bend.eval(s[i]).to_radians().sin_cos();
        let nrm_b = nrm_t * cb + t * sb;
        let c = closedness[i];
        for j in 0..m {
            let ring = ring_point(j, divisions);
            let local = section.points[j] * (1.0 - c) + ring * c;
            let offset = (side_t * local.x + nrm_b * local.y) * path[i].radius;
            mesh.positions.push((path[i].position + offset).as_vec3());
            let u = j as f32 / divisions as f32;
            mesh.uvs.push(opts.uv.map(u, s[i] as f32));
            fallback.push(if welded {
                (side_t * ring.x + nrm_b * ring.y).normalize_or(nrm_b)
            } else {
                nrm_b
            });
        }
    }
    let m32 = m as u32;
    for i in 0..(n - 1) as u32 {
        for j in 0..divisions as u32 {
            let a = i * m32 + j;
            let b = i * m32 + (j + 1) % m32;
            let c = (i + 1) * m32 + (j + 1) % m32;
            let d = (i + 1) * m32 + j;
            if welded {
                mesh.push_triangle([a, b, c]);
                mesh.push_triangle([a, c, d]);
            } else {
                mesh.push_triangle([a, c, b]);
                mesh.push_triangle([a, d, c]);
            }
        }
    }
    if welded && opts.caps {
        for (ring, is_end) in [(0usize, false), (n - 1, true)] {
            let center = mesh.positions.len() as u32;
            mesh.positions.push(path[ring].position.as_vec3());
            mesh.uvs.push(opts.uv.map(0.5, s[ring] as f32));
            fallback.push(if is_end { tangents[ring] } else { -tangents[ring] });
            let base = ring as u32 * m32;
            for j in 0..m32 {
                let a = base + j;
                let b = base + (j + 1) % m32;
                if is_end {
                    mesh.push_triangle([center, a, b]);
                } else {
                    mesh.push_triangle([center, b, a]);
                }
            }
        }
    }
    mesh.compute_normals(&fallback);
    Ok(mesh)
}

fn rotate(v: DVec3, axis: DVec3, angle: f64) -> DVec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * axis.dot(v) * (1.0 - c)
}

/// Capped cylinder between two points, tessellated along its length.
pub fn cylinder(
    start: DVec3,
    end: DVec3,
    radius: f64,
    tess: &Tessellation,
    label: OrganLabel,
    material: MaterialSlot,
) -> Result<Mesh, GeomError> {
    let len = start.distance(end);
    let rings = tess.ring_count(len);
    let path: Vec<PathSample> = (0..rings)
        .map(|i| PathSample::new(start.lerp(end, i as f64 / (rings - 1) as f64), radius))
        .collect();
    let opts = SweepOptions {
        caps: true,
        label,
        material,
        ..SweepOptions::default()
    };
    sweep_generalized_cylinder(
        &path,
        &CrossSection::circle(tess.section_points),
        &FunctionCurve::constant(0.0),
        &FunctionCurve::constant(0.0),
        &opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical(n: usize, r: f64) -> Vec<PathSample> {
        (0..n)
            .map(|i| PathSample::new(DVec3::new(0.0, 0.0, i as f64 * 0.01), r))
            .collect()
    }

    fn zero() -> FunctionCurve {
        FunctionCurve::constant(0.0)
    }

    #[test]
    fn analytic_cylinder() {
        let r = 0.0123;
        let mesh = sweep_generalized_cylinder(
            &vertical(11, r),
            &CrossSection::circle(12),
            &zero(),
            &zero(),
            &SweepOptions::default(),
        )
        .unwrap();
        for p in &mesh.positions {
            let d = (p.x as f64).hypot(p.y as f64);
            assert!((d - r).abs() < 1e-5, "{d}");
        }
        assert_eq!(mesh.vertex_count(), 11 * 12);
        // Normals point away from the axis.
        for (p, nrm) in mesh.positions.iter().zip(&mesh.normals) {
            assert!(p.x * nrm.x + p.y * nrm.y > 0.0);
        }
    }

    #[test]
    fn topology_depends_on_closedness() {
        let closed = sweep_generalized_cylinder(
            &vertical(5, 0.01),
            &CrossSection::circle(8),
            &zero(),
            &zero(),
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(closed.vertex_count(), 5 * 8);
        assert_eq!(closed.triangles.len(), 4 * 8 * 2);
        let open = sweep_generalized_cylinder(
            &vertical(5, 0.01),
            &CrossSection::blade(8, 0.0),
            &zero(),
            &zero(),
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(open.vertex_count(), 5 * 8);
        assert_eq!(open.triangles.len(), 4 * 7 * 2);
        assert!(open.boundary_edge_count() > 0);
    }

    #[test]
    fn capped_closed_sweep_is_watertight() {
        let path: Vec<PathSample> = (0..20)
            .map(|i| {
                let t = i as f64 / 19.0;
                PathSample::new(DVec3::new(0.05 * (3.0 * t).sin(), 0.02 * t * t, 0.2 * t), 0.004 + 0.002 * t)
            })
            .collect();
        let opts = SweepOptions {
            caps: true,
            ..SweepOptions::default()
        };
        let mesh = sweep_generalized_cylinder(
            &path,
            &CrossSection::circle(10),
            &FunctionCurve::constant(45.0),
            &FunctionCurve::linear(0.0, 20.0),
            &opts,
        )
        .unwrap();
        assert!(mesh.is_watertight());
        assert_eq!(mesh.vertex_count(), 20 * 10 + 2);
        mesh.validate().unwrap();
    }

    #[test]
    fn errors() {
        let sec = CrossSection::circle(6);
        let opts = SweepOptions::default();
        assert!(matches!(
            sweep_generalized_cylinder(&vertical(1, 0.01), &sec, &zero(), &zero(), &opts),
            Err(GeomError::PathTooShort(1))
        ));
        let same = vec![PathSample::new(DVec3::ONE, 0.01); 3];
        assert!(matches!(
            sweep_generalized_cylinder(&same, &sec, &zero(), &zero(), &opts),
            Err(GeomError::ZeroLengthPath)
        ));
        let mut dup = vertical(3, 0.01);
        dup.push(dup[2]);
        assert!(matches!(
            sweep_generalized_cylinder(&dup, &sec, &zero(), &zero(), &opts),
            Err(GeomError::DegenerateFrame)
        ));
        assert!(matches!(
            sweep_generalized_cylinder(&vertical(3, 0.0), &sec, &zero(), &zero(), &opts),
            Err(GeomError::NonPositiveRadius(_))
        ));
        assert!(CrossSection::new(vec![DVec2::ZERO; 2], 0.0).is_err());
        assert!(CrossSection::new(vec![DVec2::ZERO; 3], 1.5).is_err());
    }
}
