//! Meshing of turtle primitives for the grammar-driven species.

use std::collections::BTreeMap;

use glam::{DMat3, DVec3};
use rand_chacha::ChaCha8Rng;

use super::{azimuth_deg, BranchInfo, LeafInfo, LeafKind, LsysSpeciesParams, PlantAssembly, PlantError, Species};
use crate::geom::{cylinder, CrossSection, LeafSpec, MaterialSlot, Tessellation};
use crate::lsys::{derive, interpret, step, FunctionCurve, LSystemProgram, ModuleString, Primitive, TurtleConfig};

/// Derives until the string stops changing or `max_steps` is reached.
pub(crate) fn derive_to_fixpoint(
    program: &LSystemProgram,
    max_steps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ModuleString, PlantError> {
    let mut s = derive(program, 0, rng)?;
    for _ in 0..max_steps {
        let next = step(program, &s, rng)?;
        if next == s {
            break;
        }
        s = next;
    }
    Ok(s)
}

/// Turtle frame for plants: heading up, and `&` pitches toward +X.
pub(crate) fn plant_turtle(program: &LSystemProgram, stem_width: f64) -> TurtleConfig {
    TurtleConfig {
        left: DVec3::Y,
        width: stem_width,
        ..TurtleConfig::default()
    }
    .with_inert(program.inert_symbols())
}

pub(crate) fn build(
    species: Species,
    age: f64,
    seed: u64,
    program: &LSystemProgram,
    ms: &ModuleString,
    params: &LsysSpeciesParams,
) -> Result<PlantAssembly, PlantError> {
    let prims = interpret(ms, &plant_turtle(program, params.stem_width))?;
    let mut out = PlantAssembly::new(species, age, seed);
    let stem_tess = Tessellation {
        section_points: params.stem_section_points,
        ..params.tessellation
    };
    let shape = &params.leaf;
    let section_points = params.tessellation.section_points;
    let mut section = match &shape.section_curve {
        Some(name) => CrossSection::from_curve(
            program.curve(name).ok_or_else(|| PlantError::Params {
                key: format!("{species}.leaf.section_curve"),
                message: format!("the grammar has no curve `{name}`"),
            })?,
            section_points,
        ),
        None => CrossSection::blade(section_points, shape.cup),
    };
    let sheathed = shape.sheath_fraction > 0.0;
    if sheathed {
        section = section.with_closedness(1.0)?;
    }
    let width_profile = if sheathed {
        let f = shape.sheath_fraction.clamp(0.01, 0.9);
        FunctionCurve::new(&[
            (0.0, shape.sheath_width),
            (f, shape.sheath_width),
            ((f + 0.15).min(0.99), 1.0),
            (1.0, 1.0),
        ])?
    } else {
        FunctionCurve::constant(1.0)
    };

    // Branch bookkeeping: the open branch at each bracket depth.
    let mut open: BTreeMap<usize, usize> = BTreeMap::new();
    let mut top = 0.0f64;
    for prim in &prims {
        match prim {
            Primitive::Segment(s) => {
                let len = s.start.distance(s.end);
                top = top.max(s.end.z);
                if len <= 1e-9 {
                    continue;
                }
                let radius = (s.width * 0.5).max(1e-4);
                let mesh = cylinder(s.start, s.end, radius, &stem_tess, s.label, MaterialSlot::stem())?;
                out.meshes.push(mesh);
                let mi = out.meshes.len() - 1;
                if s.depth == 0 {
                    continue;
                }
                open.retain(|&d, _| d <= s.depth);
                if s.starts_branch {
                    out.branches.push(BranchInfo {
                        origin: s.start,
                        length: len,
                        order: s.depth,
                        meshes: vec![mi],
                    });
                    open.insert(s.depth, out.branches.len() - 1);
                } else if let Some(&bi) = open.get(&s.depth) {
                    out.branches[bi].length += len;
                    out.branches[bi].meshes.push(mi);
                }
            }
            Primitive::Leaf(l) => {
                if !(l.length > 0.0 && l.width > 0.0) {
                    continue;
                }
                let mut spec = LeafSpec::new(l.length, l.width);
                let droop = l.params.get(3).copied().unwrap_or(shape.droop);
                spec.bend = FunctionCurve::linear(0.0, droop);
                spec.twist = FunctionCurve::constant(shape.twist_rate);
                spec.section = section.clone();
                spec.width_profile = width_profile.clone();
                if sheathed {
                    spec.blade_closedness = Some(0.0);
                    spec.blend = (0.0, shape.sheath_fraction);
                }
                spec.label = l.label;
                spec.tessellation = params.tessellation;
                let mut mesh = spec.build()?;
                mesh.transform(DMat3::from_cols(l.heading, l.left, l.up), l.position);
                out.meshes.push(mesh);
                out.leaves.push(LeafInfo {
                    kind: LeafKind::Blade,
                    node: l.position,
                    direction: l.heading,
                    azimuth_deg: azimuth_deg(l.heading),
                    length: l.length,
                    width: l.width,
                    age: l.age,
                    opened: true,
                    meshes: vec![out.meshes.len() - 1],
                });
            }
        }
    }
    out.leaf_count = out.leaves.len();
    let mut out = out.finish();
    out.height = out
        .bounds()
        .map(|(_, hi)| hi.z as f64)
        .unwrap_or(top)
        .max(top)
        .max(1e-4);
    Ok(out)
}
