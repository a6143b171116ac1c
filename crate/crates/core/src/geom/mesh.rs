use glam::{DMat3, DVec3, Vec2, Vec3};
use serde::{Deserialize, Serialize};

use crate::lsys::OrganLabel;

/// Minimum triangle area kept in a mesh (m²).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKind {
    Stem,
    Leaf,
}

/// Material reference of a mesh: which atlas cell it samples and how the
/// sampled colour is perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSlot {
    pub kind: MaterialKind,
    /// Atlas cell index for leaves; `None` until textures are assigned.
    pub cell: Option<usize>,
    /// Per-channel RGB multiplier approximating a hue shift.
    pub tint: [f32; 3],
    pub brightness: f32,
}

impl MaterialSlot {
    pub fn stem() -> Self {
        Self {
            kind: MaterialKind::Stem,
            cell: None,
            tint: [1.0; 3],
            brightness: 1.0,
        }
    }

    pub fn leaf() -> Self {
        Self {
            kind: MaterialKind::Leaf,
            ..Self::stem()
        }
    }
}

/// Axis-aligned rectangle in texture coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UvRect {
    pub min: [f32; 2],
    pub max: [f32; 2],
}

impl UvRect {
    pub const UNIT: UvRect = UvRect {
        min: [0.0, 0.0],
        max: [1.0, 1.0],
    };

    pub fn map(&self, u: f32, v: f32) -> Vec2 {
        Vec2::new(
            self.min[0] + (self.max[0] - self.min[0]) * u,
            self.min[1] + (self.max[1] - self.min[1]) * v,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub uvs: Vec<Vec2>,
    pub triangles: Vec<[u32; 3]>,
    pub label: OrganLabel,
    pub material: MaterialSlot,
}

impl Mesh {
    pub fn new(label: OrganLabel, material: MaterialSlot) -> Self {
        Self {
            positions: Vec::new(),
            normals: Vec::new(),
            uvs: Vec::new(),
            triangles: Vec::new(),
            label,
            material,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_area(&self, t: [u32; 3]) -> f64 {
        let a = self.positions[t[0] as usize].as_dvec3();
        let b = self.positions[t[1] as usize].as_dvec3();
        let c = self.positions[t[2] as usize].as_dvec3();
        0.5 * (b - a).cross(c - a).length()
    }

    /// Pushes a triangle unless it is degenerate.
    pub(crate) fn push_triangle(&mut self, t: [u32; 3]) {
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && self.triangle_area(t) > MIN_TRIANGLE_AREA {
            self.triangles.push(t);
        }
    }

    /// Recomputes vertex normals as area-weighted face normals; vertices
    /// without faces keep `fallback`.
    pub(crate) fn compute_normals(&mut self, fallback: &[DVec3]) {
        let mut acc = vec![DVec3::ZERO; self.positions.len()];
        for t in &self.triangles {
            let a = self.positions[t[0] as usize].as_dvec3();
            let b = self.positions[t[1] as usize].as_dvec3();
            let c = self.positions[t[2] as usize].as_dvec3();
            let n = (b - a).cross(c - a);
            for &i in t {
                acc[i as usize] += n;
            }
        }
        self.normals = acc
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let n = if n.length_squared() > 1e-30 {
                    *n
                } else {
                    fallback.get(i).copied().unwrap_or(DVec3::Z)
                };
                n.normalize().as_vec3()
            })
            .collect();
    }

    /// Applies a rigid transform `p -> rotation * p + translation`.
    pub fn transform(&mut self, rotation: DMat3, translation: DVec3) {
        for p in &mut self.positions {
            *p = (rotation * p.as_dvec3() + translation).as_vec3();
        }
        for n in &mut self.normals {
            *n = (rotation * n.as_dvec3()).normalize().as_vec3();
        }
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.positions.iter();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| (lo.min(*p), hi.max(*p))))
    }

    /// Checks the mesh invariants, returning a description of the first
    /// violation.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.positions.len();
        if self.normals.len() != n || self.uvs.len() != n {
            return Err("attribute arrays differ in length".into());
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v as usize >= n) {
                return Err(format!("triangle {i} indexes out of range"));
            }
            if self.triangle_area(*t) <= MIN_TRIANGLE_AREA {
                return Err(format!("triangle {i} is degenerate"));
            }
        }
        for (i, nrm) in self.normals.iter().enumerate() {
            if (nrm.length() - 1.0).abs() > 1e-4 {
                return Err(format!("normal {i} has length {}", nrm.length()));
            }
        }
        Ok(())
    }

    /// Undirected edges that are not shared by exactly two triangles.
    pub fn boundary_edge_count(&self) -> usize {
        use std::collections::HashMap;
        let mut edges: HashMap<(u32, u32), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        edges.values().filter(|&&c| c != 2).count()
    }

    pub fn is_watertight(&self) -> bool {
        !self.triangles.is_empty() && self.boundary_edge_count() == 0
    }
}
