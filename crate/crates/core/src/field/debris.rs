//! Small clods and residue scattered in noise-driven clusters.

use std::f64::consts::TAU;

use glam::{DVec2, DVec3, Vec2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FieldScene, Placement};
use crate::geom::{MaterialSlot, Mesh};
use crate::lsys::OrganLabel;
use crate::noise::Fbm;
use crate::seed::{sub_seed, substream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DebrisConfig {
    /// Range the per-scene density is drawn from; 0 disables debris.
    pub density: (f64, f64),
    /// Noise wavelength as a multiple of the row spacing.
    pub wavelength_factor: f64,
    pub octaves: usize,
    /// Candidate points per square metre.
    pub candidates_per_m2: f64,
    /// Range of the horizontal debris radius, m.
    pub size: (f64, f64),
    /// Number of distinct shapes generated per scene.
    pub shapes: usize,
    /// Free distance kept from every crop stem, m.
    pub stem_clearance: f64,
}

impl Default for DebrisConfig {
    fn default() -> Self {
        Self {
            density: (0.0, 1.0),
            wavelength_factor: 1.0,
            octaves: 4,
            candidates_per_m2: 250.0,
            size: (0.004, 0.025),
            shapes: 6,
            stem_clearance: 0.01,
        }
    }
}

/// A flattened, star-shaped hull with a soil-toned colour.
#[derive(Debug, Clone, PartialEq)]
pub struct DebrisShape {
    /// Unit-radius mesh resting on z = 0.
    pub mesh: Mesh,
    pub color: [f32; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebrisInstance {
    pub shape: usize,
    pub placement: Placement,
    /// Horizontal radius after scaling, m.
    pub radius: f64,
}

/// Builds `n` closed debris hulls: perturbed, flattened spheres.
pub fn debris_shapes(n: usize, seed: u64) -> Vec<DebrisShape> {
    (0..n)
        .map(|k| {
            let mut rng = substream(seed, &format!("shape/{k}"));
            let (rings, segs) = (6usize, 10usize);
            let flat = rng.random_range(0.25..0.6);
            let bumps: Vec<f64> = (0..rings * segs).map(|_| rng.random_range(0.75..1.0)).collect();
            let mut mesh = Mesh::new(OrganLabel::Stem, MaterialSlot::stem());
            // Poles then ring vertices; ring r sits at polar angle π(r+1)/(rings+1).
            let mut push = |p: DVec3| {
                mesh.positions.push(p.as_vec3());
                mesh.normals.push(p.normalize_or_zero().as_vec3());
                mesh.uvs.push(Vec2::ZERO);
            };
            push(DVec3::new(0.0, 0.0, 2.0 * flat));
            push(DVec3::ZERO);
            for r in 0..rings {
                let polar = std::f64::consts::PI * (r + 1) as f64 / (rings + 1) as f64;
                for s in 0..segs {
                    let a = TAU * s as f64 / segs as f64;
                    let rad = bumps[r * segs + s];
                    push(DVec3::new(
                        rad * polar.sin() * a.cos(),
                        rad * polar.sin() * a.sin(),
                        flat * (1.0 + polar.cos() * rad),
                    ));
                }
            }
            let v = |r: usize, s: usize| (2 + r * segs + s % segs) as u32;
            for s in 0..segs {
                mesh.push_triangle([0, v(0, s), v(0, s + 1)]);
                mesh.push_triangle([1, v(rings - 1, s + 1), v(rings - 1, s)]);
                for r in 0..rings - 1 {
                    mesh.push_triangle([v(r, s), v(r + 1, s), v(r + 1, s + 1)]);
                    mesh.push_triangle([v(r, s), v(r + 1, s + 1), v(r, s + 1)]);
                }
            }
            let fallback = mesh.normals.iter().map(|n| n.as_dvec3()).collect::<Vec<_>>();
            mesh.compute_normals(&fallback);
            let tone = rng.random_range(0.55..1.0) as f32;
            let straw = rng.random_bool(0.4);
            let color = if straw {
                [0.62 * tone, 0.52 * tone, 0.34 * tone]
            } else {
                [0.38 * tone, 0.29 * tone, 0.21 * tone]
            };
            DebrisShape { mesh, color }
        })
        .collect()
}

/// Accepts uniform candidate points where fractal noise exceeds a
/// density-dependent threshold. The noise wavelength follows the row
/// spacing. Points closer than the clearance to a crop stem are rejected.
pub fn scatter_debris(mut scene: FieldScene, density: f64, cfg: &DebrisConfig, seed: u64) -> FieldScene {
    scene.debris.clear();
    scene.debris_density = density.max(0.0);
    if !(density > 0.0) {
        return scene;
    }
    let mut rng = substream(seed, "debris");
    let fbm = Fbm::new(cfg.octaves.max(1), 2.0, 0.5, sub_seed(seed, "debris/noise")).expect("octaves > 0");
    let wavelength = scene.layout.row_spacing * cfg.wavelength_factor;
    let threshold = 1.0 - 1.4 * density;
    let (lo, hi) = (scene.layout.min(), scene.layout.max());
    let area = (hi - lo).x * (hi - lo).y;
    let n = (area * cfg.candidates_per_m2).round() as usize;
    let stems: Vec<(DVec2, f64)> = scene
        .instances
        .iter()
        .filter(|i| i.species == crate::plants::Species::Soybean)
        .map(|i| (i.placement.position.truncate(), i.stem_radius))
        .collect();
    let shapes = scene.debris_shapes.len().max(1);
    for _ in 0..n {
        let p = DVec2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        let radius = rng.random_range(cfg.size.0..=cfg.size.1.max(cfg.size.0));
        let shape = rng.random_range(0..shapes);
        let yaw = rng.random_range(0.0..TAU);
        if fbm.sample(p / wavelength) <= threshold {
            continue;
        }
        if stems.iter().any(|(c, r)| c.distance(p) < radius + r + cfg.stem_clearance) {
            continue;
        }
        let z = scene.soil.height_at(p);
        scene.debris.push(DebrisInstance {
            shape,
            placement: Placement {
                position: p.extend(z),
                yaw,
                scale: radius,
            },
            radius,
        });
    }
    scene
}

/// Morisita's index of dispersion over a `q × q` quadrat grid on `[min, max]`:
/// about 1 for uniform scatter, larger for clustered points.
pub fn morisita_index(points: &[DVec2], min: DVec2, max: DVec2, q: usize) -> f64 {
    let n = points.len();
    if n < 2 || q == 0 {
        return 0.0;
    }
    let mut counts = vec![0usize; q * q];
    let size = max - min;
    for p in points {
        let t = (*p - min) / size;
        let i = ((t.x * q as f64) as usize).min(q - 1);
        let j = ((t.y * q as f64) as usize).min(q - 1);
        counts[j * q + i] += 1;
    }
    let s: usize = counts.iter().map(|&c| c * c.saturating_sub(1)).sum();
    (q * q) as f64 * s as f64 / (n * (n - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_are_closed() {
        let shapes = debris_shapes(4, 9);
        assert_eq!(shapes.len(), 4);
        for s in &shapes {
            assert!(s.mesh.is_watertight());
            s.mesh.validate().unwrap();
            let (lo, _) = s.mesh.bounds().unwrap();
            assert!(lo.z.abs() < 1e-6);
        }
    }

    #[test]
    fn morisita_of_one_cell_is_q2() {
        let pts = vec![DVec2::splat(0.01); 10];
        let i = morisita_index(&pts, DVec2::ZERO, DVec2::ONE, 4);
        assert!((i - 16.0).abs() < 1e-12);
    }
}
