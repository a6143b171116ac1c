//! Soybean built directly on geometry primitives: a cubic Bézier main stem
//! carrying cotyledons, a unifoliate pair and alternate trifoliates.

use glam::{DMat3, DVec3};
use rand::Rng;

use super::{azimuth_deg, LeafInfo, LeafKind, PlantAssembly, PlantError, SoybeanParams, Species};
use crate::geom::{
    bezier_eval, cylinder, sweep_generalized_cylinder, CrossSection, LeafSpec, MaterialSlot, Mesh,
    PathSample, SweepOptions, Tessellation,
};
use crate::lsys::{FunctionCurve, OrganLabel};
use crate::seed::substream;

/// Organ timing of one plant, days after planting.
#[derive(Debug, Clone, PartialEq)]
pub struct SoybeanSchedule {
    pub unifoliate_emergence: f64,
    pub unifoliate_open: f64,
    pub trifoliate_emergence: Vec<f64>,
    pub trifoliate_open: Vec<f64>,
}

impl SoybeanSchedule {
    pub fn new(p: &SoybeanParams, shift: f64) -> Self {
        let emergence: Vec<f64> = (0..p.max_trifoliates)
            .map(|k| p.first_trifoliate + k as f64 * p.trifoliate_interval + shift)
            .collect();
        Self {
            unifoliate_emergence: p.unifoliate_emergence + shift,
            unifoliate_open: p.unifoliate_emergence + p.unifoliate_open_days + shift,
            trifoliate_open: emergence.iter().map(|e| e + p.trifoliate_open_days).collect(),
            trifoliate_emergence: emergence,
        }
    }

    pub fn trifoliates_present(&self, age: f64) -> usize {
        self.trifoliate_emergence.iter().filter(|&&e| age >= e).count()
    }

    pub fn trifoliates_open(&self, age: f64) -> usize {
        self.trifoliate_open.iter().filter(|&&e| age >= e).count()
    }

    /// Fully opened leaves: the unifoliate pair counts as one leaf.
    pub fn opened_leaves(&self, age: f64) -> usize {
        usize::from(age >= self.unifoliate_open) + self.trifoliates_open(age)
    }
}

/// Per-plant random draws, taken in a fixed order so every age of one seed
/// sees the same values.
struct Draws {
    shift: f64,
    vigour: f64,
    lean_azimuth: f64,
    lean: f64,
    base_azimuth: f64,
    /// Per organ slot: (azimuth jitter, size factor, droop jitter).
    organ: Vec<(f64, f64, f64)>,
}

impl Draws {
    fn new(seed: u64, p: &SoybeanParams) -> Self {
        let mut rng = substream(seed, "soybean");
        let sym = |r: &mut rand_chacha::ChaCha8Rng, w: f64| if w > 0.0 { r.random_range(-w..=w) } else { 0.0 };
        let shift = sym(&mut rng, p.timing_jitter);
        let vigour = if p.vigour.1 > p.vigour.0 {
            rng.random_range(p.vigour.0..=p.vigour.1)
        } else {
            p.vigour.0
        };
        let lean_azimuth = rng.random_range(0.0..360.0);
        let lean = sym(&mut rng, p.stem_lean).abs();
        let base_azimuth = rng.random_range(0.0..360.0);
        // 2 cotyledons, 2 unifoliates, 3 leaflets per trifoliate.
        let slots = 4 + 3 * p.max_trifoliates;
        let organ = (0..slots)
            .map(|_| {
                let a = sym(&mut rng, p.azimuth_jitter);
                let s = 1.0 + sym(&mut rng, p.size_jitter);
                let d = sym(&mut rng, p.droop_jitter);
                (a, s, d)
            })
            .collect();
        Self {
            shift,
            vigour,
            lean_azimuth,
            lean,
            base_azimuth,
            organ,
        }
    }
}

/// Unit direction with the given azimuth and elevation (degrees).
fn direction(azimuth: f64, elevation: f64) -> DVec3 {
    let (sa, ca) = azimuth.to_radians().sin_cos();
    let (se, ce) = elevation.to_radians().sin_cos();
    DVec3::new(ce * ca, ce * sa, se)
}

/// Rotation taking the leaf frame (+X length, +Y width, +Z face) to a leaf
/// pointing along `dir` with its width horizontal.
fn leaf_frame(dir: DVec3) -> DMat3 {
    let side = DVec3::Z.cross(dir).try_normalize().unwrap_or(DVec3::Y);
    DMat3::from_cols(dir, side, dir.cross(side))
}

struct Builder<'a> {
    p: &'a SoybeanParams,
    out: PlantAssembly,
}

impl Builder<'_> {
    fn push(&mut self, m: Mesh) -> usize {
        self.out.meshes.push(m);
        self.out.meshes.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    fn blade(
        &mut self,
        at: DVec3,
        dir: DVec3,
        length: f64,
        width: f64,
        droop: f64,
        cup: f64,
        label: OrganLabel,
    ) -> Result<usize, PlantError> {
        let mut spec = LeafSpec::new(length, width);
        spec.bend = FunctionCurve::linear(0.0, droop);
        spec.section = CrossSection::blade(self.p.tessellation.section_points, cup);
        spec.label = label;
        spec.tessellation = self.p.tessellation;
        let mut mesh = spec.build()?;
        mesh.transform(leaf_frame(dir), at);
        Ok(self.push(mesh))
    }

    fn petiole(&mut self, from: DVec3, to: DVec3) -> Result<usize, PlantError> {
        let tess = Tessellation {
            section_points: self.p.petiole_section_points,
            ..self.p.tessellation
        };
        let m = cylinder(from, to, self.p.petiole_radius, &tess, OrganLabel::Stem, MaterialSlot::stem())?;
        Ok(self.push(m))
    }
}

/// Grows a soybean plant of `age` days.
pub fn grow_soybean(age: f64, seed: u64, p: &SoybeanParams) -> Result<PlantAssembly, PlantError> {
    if !(age >= p.emergence_day && age <= p.end_day) {
        return Err(PlantError::AgeOutOfWindow {
            species: Species::Soybean,
            age,
            min: p.emergence_day,
            max: p.end_day,
        });
    }
    let d = Draws::new(seed, p);
    let sched = SoybeanSchedule::new(p, d.shift);
    let elong = |born: f64| p.elongation.eval(age - born);

    // Internode lengths from the ground up; node i sits on top of internode i.
    let mut internodes = vec![p.hypocotyl_length * elong(p.hypocotyl_start + d.shift)];
    let has_unifoliates = age >= sched.unifoliate_emergence;
    if has_unifoliates {
        internodes.push(p.epicotyl_length * elong(sched.unifoliate_emergence));
    }
    let n_tri = sched.trifoliates_present(age);
    for k in 0..n_tri {
        internodes.push(p.internode_length * elong(sched.trifoliate_emergence[k]));
    }
    let total: f64 = internodes.iter().sum::<f64>() * d.vigour;
    let height = total.min(p.height_cap);
    let scale = height / internodes.iter().sum::<f64>();
    let mut node_z = Vec::with_capacity(internodes.len());
    let mut z = 0.0;
    for l in &internodes {
        z += l * scale;
        node_z.push(z);
    }
    *node_z.last_mut().unwrap() = height;

    let lean = direction(d.lean_azimuth, 0.0) * height * d.lean.to_radians().tan();
    let ctrl = [
        DVec3::ZERO,
        DVec3::new(0.0, 0.0, height / 3.0),
        DVec3::new(0.4 * lean.x, 0.4 * lean.y, 2.0 * height / 3.0),
        DVec3::new(lean.x, lean.y, height),
    ];
    let t_at = |z: f64| {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bezier_eval(&ctrl, mid).map(|p| p.z).unwrap_or(0.0) < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut b = Builder {
        p,
        out: PlantAssembly::new(Species::Soybean, age, seed),
    };

    // Main stem.
    let stem_r = p.stem_radius * (0.6 + 0.4 * (height / p.height_cap).min(1.0));
    let rings = p.tessellation.ring_count(height);
    let path: Vec<PathSample> = (0..rings)
        .map(|i| {
            let t = i as f64 / (rings - 1) as f64;
            Ok(PathSample::new(bezier_eval(&ctrl, t)?, stem_r * (1.0 - 0.45 * t)))
        })
        .collect::<Result<_, crate::geom::GeomError>>()?;
    let stem = sweep_generalized_cylinder(
        &path,
        &CrossSection::circle(p.tessellation.section_points),
        &FunctionCurve::constant(0.0),
        &FunctionCurve::constant(0.0),
        &SweepOptions {
            caps: true,
            initial_normal: Some(DVec3::X),
            ..SweepOptions::default()
        },
    )?;
    b.push(stem);

    let node = |i: usize| -> Result<(DVec3, f64), PlantError> {
        let t = t_at(node_z[i]);
        Ok((bezier_eval(&ctrl, t)?, node_z[i] / height))
    };
    let a0 = d.base_azimuth;

    // Cotyledons: thick, nearly horizontal, opposite.
    let (pos, _) = node(0)?;
    for (slot, az) in [(0usize, a0), (1, a0 + 180.0)] {
        let (aj, s, dj) = d.organ[slot];
        let dir = direction(az + aj, 15.0);
        let len = p.cotyledon_length * s;
        let wid = p.cotyledon_width * s;
        let mi = b.blade(pos, dir, len, wid, 10.0 + dj * 0.5, 0.3, OrganLabel::Cotyledon)?;
        b.out.leaves.push(LeafInfo {
            kind: LeafKind::Cotyledon,
            node: pos,
            direction: dir,
            azimuth_deg: azimuth_deg(dir),
            length: len,
            width: wid,
            age: age - p.emergence_day,
            opened: true,
            meshes: vec![mi],
        });
    }

    // Unifoliate pair, perpendicular to the cotyledons.
    if has_unifoliates {
        let (pos, q) = node(1)?;
        let leaf_age = age - sched.unifoliate_emergence;
        let e = p.expansion.eval(leaf_age / p.unifoliate_open_days);
        let open = (leaf_age / p.unifoliate_open_days).clamp(0.0, 1.0);
        let elev = 75.0 * (1.0 - open) + p.inclination.eval(q) * open;
        for (slot, az) in [(2usize, a0 + 90.0), (3, a0 + 270.0)] {
            let (aj, s, dj) = d.organ[slot];
            let dir = direction(az + aj, elev);
            let tip = pos + dir * p.unifoliate_petiole * e;
            let mut meshes = vec![b.petiole(pos, tip)?];
            let size = e * s * p.position_size.eval(q);
            let len = p.unifoliate_length * size;
            let wid = p.unifoliate_width * size;
            let blade_dir = direction(az + aj, elev * 0.4);
            let cup = p.leaf_cup + (1.0 - open) * 0.8;
            meshes.push(b.blade(tip, blade_dir, len, wid, (p.droop + dj) * open, cup, OrganLabel::Leaf)?);
            b.out.leaves.push(LeafInfo {
                kind: LeafKind::Unifoliate,
                node: pos,
                direction: dir,
                azimuth_deg: azimuth_deg(dir),
                length: len,
                width: wid,
                age: leaf_age,
                opened: age >= sched.unifoliate_open,
                meshes,
            });
        }
    }

    // Alternate trifoliates.
    for k in 0..n_tri {
        let (pos, q) = node(2 + k)?;
        let leaf_age = age - sched.trifoliate_emergence[k];
        let e = p.expansion.eval(leaf_age / p.trifoliate_open_days);
        let open = (leaf_age / p.trifoliate_open_days).clamp(0.0, 1.0);
        let elev = 75.0 * (1.0 - open) + p.inclination.eval(q) * open;
        let slot = 4 + 3 * k;
        let (aj, s, dj) = d.organ[slot];
        let az = a0 + 180.0 * k as f64 + aj;
        let dir = direction(az, elev);
        let size = e * s * p.position_size.eval(q);
        let tip = pos + dir * p.petiole_length * size;
        let mut meshes = vec![b.petiole(pos, tip)?];
        let cup = p.leaf_cup + (1.0 - open) * 0.8;
        let spread = p.lateral_leaflet_angle * (0.3 + 0.7 * open);
        for (j, (offset, scale)) in [(0.0, 1.0), (spread, p.lateral_leaflet_scale), (-spread, p.lateral_leaflet_scale)]
            .into_iter()
            .enumerate()
        {
            let (lj, ls, ld) = d.organ[slot + j];
            let jitter = if j == 0 { 0.0 } else { lj * 0.5 };
            let ldir = direction(az + offset + jitter, elev * 0.4);
            let len = p.leaflet_length * size * scale * if j == 0 { 1.0 } else { ls };
            let wid = p.leaflet_width * size * scale * if j == 0 { 1.0 } else { ls };
            meshes.push(b.blade(tip, ldir, len, wid, (p.droop + dj + ld * 0.5) * open, cup, OrganLabel::Leaf)?);
        }
        b.out.leaves.push(LeafInfo {
            kind: LeafKind::Trifoliate,
            node: pos,
            direction: dir,
            azimuth_deg: azimuth_deg(dir),
            length: p.leaflet_length * size,
            width: p.leaflet_width * size,
            age: leaf_age,
            opened: age >= sched.trifoliate_open[k],
            meshes,
        });
    }

    b.out.height = height;
    b.out.leaf_count = sched.opened_leaves(age);
    Ok(b.out.finish())
}
