//! Banded z-buffer rasterizer with a deferred shading pass.

use glam::{DMat3, DVec3, Vec2};
use rayon::prelude::*;

use super::camera::View;
use crate::geom::{MaterialKind, Mesh};
use crate::plants::TextureAtlas;

/// Rows per band; bands are the unit of parallel work.
pub(crate) const BAND_ROWS: u32 = 16;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Surface {
    Soil,
    Debris { color: [f32; 3] },
    Plant { id: u16 },
}

pub(crate) struct Item<'a> {
    pub mesh: &'a Mesh,
    pub rotation: DMat3,
    pub translation: DVec3,
    pub surface: Surface,
    /// Atlas for alpha-tested leaves.
    pub atlas: Option<&'a TextureAtlas>,
}

impl Item<'_> {
    pub fn alpha_tested(&self) -> bool {
        self.atlas.is_some() && self.mesh.material.kind == MaterialKind::Leaf && self.mesh.material.cell.is_some()
    }
}

/// A screen-space triangle: pixel x, pixel y and 1/depth per vertex, and the
/// barycentric coordinates of each vertex in the source triangle (these
/// differ from the identity only after near-plane clipping).
struct ScreenTri {
    s: [[f32; 3]; 3],
    src: [[f32; 3]; 3],
    item: u32,
    tri: u32,
    bbox: [i32; 4],
}

/// Visible surface at one pixel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fragment {
    pub depth: f32,
    pub item: u32,
    pub tri: u32,
    /// Barycentrics of source vertices 1 and 2.
    pub bary: [f32; 2],
}

impl Fragment {
    pub const EMPTY: Fragment = Fragment {
        depth: f32::INFINITY,
        item: u32::MAX,
        tri: 0,
        bary: [0.0; 2],
    };

    pub fn is_empty(&self) -> bool {
        self.item == u32::MAX
    }

    pub fn weights(&self) -> [f32; 3] {
        [1.0 - self.bary[0] - self.bary[1], self.bary[0], self.bary[1]]
    }
}

fn clip_near(c: [DVec3; 3], near: f64) -> Vec<(DVec3, [f64; 3])> {
    let ids = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut out = Vec::with_capacity(4);
    for k in 0..3 {
        let (a, b) = (k, (k + 1) % 3);
        let (ia, ib) = (c[a].z >= near, c[b].z >= near);
        if ia {
            out.push((c[a], ids[a]));
        }
        if ia != ib {
            let t = (near - c[a].z) / (c[b].z - c[a].z);
            let p = c[a].lerp(c[b], t);
            let w = [0, 1, 2].map(|i| ids[a][i] * (1.0 - t) + ids[b][i] * t);
            out.push((DVec3::new(p.x, p.y, near), w));
        }
    }
    out
}

fn setup(items: &[Item], view: &View, width: u32, height: u32, near: f64, far: f64) -> Vec<ScreenTri> {
    let mut tris = Vec::new();
    for (ii, item) in items.iter().enumerate() {
        let cam: Vec<DVec3> = item
            .mesh
            .positions
            .iter()
            .map(|p| view.to_camera(item.rotation * p.as_dvec3() + item.translation))
            .collect();
        for (ti, t) in item.mesh.triangles.iter().enumerate() {
            let c = t.map(|v| cam[v as usize]);
            if c.iter().all(|p| p.z < near) || c.iter().all(|p| p.z >= far) {
                continue;
            }
            let poly = if c.iter().all(|p| p.z >= near) {
                vec![(c[0], [1.0, 0.0, 0.0]), (c[1], [0.0, 1.0, 0.0]), (c[2], [0.0, 0.0, 1.0])]
            } else {
                clip_near(c, near)
            };
            for k in 1..poly.len().saturating_sub(1) {
                let vs = [poly[0], poly[k], poly[k + 1]];
                let s = vs.map(|(p, _)| {
                    let q = view.to_screen(p);
                    [q.x as f32, q.y as f32, (1.0 / p.z) as f32]
                });
                let (mut x0, mut y0, mut x1, mut y1) = (f32::MAX, f32::MAX, f32::MIN, f32::MIN);
                for v in &s {
                    x0 = x0.min(v[0]);
                    y0 = y0.min(v[1]);
                    x1 = x1.max(v[0]);
                    y1 = y1.max(v[1]);
                }
                // Pixel centres sit at +0.5.
                let bx0 = ((x0 - 0.5).ceil() as i32).max(0);
                let by0 = ((y0 - 0.5).ceil() as i32).max(0);
                let bx1 = ((x1 - 0.5).floor() as i32).min(width as i32 - 1);
                let by1 = ((y1 - 0.5).floor() as i32).min(height as i32 - 1);
                if bx0 > bx1 || by0 > by1 {
                    continue;
                }
                tris.push(ScreenTri {
                    s,
                    src: vs.map(|(_, w)| w.map(|x| x as f32)),
                    item: ii as u32,
                    tri: ti as u32,
                    bbox: [bx0, by0, bx1, by1],
                });
            }
        }
    }
    tris
}

fn edge(a: [f32; 3], b: [f32; 3], px: f32, py: f32) -> f32 {
    (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
}

fn raster_band(
    band: u32,
    bin: &[u32],
    tris: &[ScreenTri],
    items: &[Item],
    width: u32,
    height: u32,
    far: f32,
) -> Vec<Fragment> {
    let y_start = band * BAND_ROWS;
    let y_end = (y_start + BAND_ROWS).min(height);
    let mut buf = vec![Fragment::EMPTY; ((y_end - y_start) * width) as usize];
    for &ti in bin {
        let t = &tris[ti as usize];
        let [a, b, c] = t.s;
        let area = edge(a, b, c[0], c[1]);
        if area.abs() < 1e-12 {
            continue;
        }
        let item = &items[t.item as usize];
        let alpha = item.alpha_tested().then_some(item);
        let ya = (t.bbox[1] as u32).max(y_start);
        let yb = (t.bbox[3] as u32 + 1).min(y_end);
        for y in ya..yb {
            let py = y as f32 + 0.5;
            for x in t.bbox[0] as u32..=t.bbox[2] as u32 {
                let px = x as f32 + 0.5;
                let w0 = edge(b, c, px, py) / area;
                let w1 = edge(c, a, px, py) / area;
                let w2 = edge(a, b, px, py) / area;
                if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                    continue;
                }
                let inv = w0 * a[2] + w1 * b[2] + w2 * c[2];
                if !(inv > 0.0) {
                    continue;
                }
                let depth = 1.0 / inv;
                let slot = &mut buf[((y - y_start) * width + x) as usize];
                if depth >= far || depth >= slot.depth {
                    continue;
                }
                let p = [w0 * a[2] / inv, w1 * b[2] / inv, w2 * c[2] / inv];
                let src = [0, 1, 2].map(|k| p[0] * t.src[0][k] + p[1] * t.src[1][k] + p[2] * t.src[2][k]);
                if let Some(it) = alpha {
                    let v = it.mesh.triangles[t.tri as usize];
                    let uv: Vec2 = (0..3).map(|k| it.mesh.uvs[v[k] as usize] * src[k]).sum();
                    if !it.atlas.expect("alpha-tested items have an atlas").is_opaque(uv) {
                        continue;
                    }
                }
                *slot = Fragment {
                    depth,
                    item: t.item,
                    tri: t.tri,
                    bary: [src[1], src[2]],
                };
            }
        }
    }
    buf
}

/// Visibility pass: the nearest fragment per pixel. Each band owns its rows
/// and walks its triangles in submission order, so the result does not
/// depend on the number of workers.
pub(crate) fn visibility(items: &[Item], view: &View, width: u32, height: u32, near: f64, far: f64) -> Vec<Fragment> {
    let tris = setup(items, view, width, height, near, far);
    let bands = height.div_ceil(BAND_ROWS);
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); bands as usize];
    for (i, t) in tris.iter().enumerate() {
        for b in t.bbox[1] as u32 / BAND_ROWS..=t.bbox[3] as u32 / BAND_ROWS {
            bins[b as usize].push(i as u32);
        }
    }
    bins.par_iter()
        .enumerate()
        .map(|(b, bin)| raster_band(b as u32, bin, &tris, items, width, height, far as f32))
        .collect::<Vec<_>>()
        .concat()
}
