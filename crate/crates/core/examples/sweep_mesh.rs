//! Sweep a generalized cylinder and a leaf blade, then export both as OBJ.
//!
//! cargo run --example sweep_mesh -- /tmp/sweep.obj

use glam::DVec3;
use soyfield::geom::{
    cylinder, sweep_generalized_cylinder, write_obj, CrossSection, LeafSpec, MaterialSlot, ObjObject, PathSample,
    SweepOptions, Tessellation,
};
use soyfield::lsys::{FunctionCurve, OrganLabel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep.obj".into());

    // A tapering, curving stem with a closed circular section.
    let path: Vec<PathSample> = (0..40)
        .map(|i| {
            let t = i as f64 / 39.0;
            PathSample::new(DVec3::new(0.03 * (t * 3.0).sin(), 0.0, 0.2 * t), 0.004 * (1.0 - 0.6 * t))
        })
        .collect();
    let opts = SweepOptions {
        caps: true,
        ..SweepOptions::default()
    };
    let stem = sweep_generalized_cylinder(
        &path,
        &CrossSection::circle(12),
        &FunctionCurve::constant(0.0),
        &FunctionCurve::constant(0.0),
        &opts,
    )?;
    println!("stem: {} triangles, watertight {}", stem.triangles.len(), stem.is_watertight());

    let straight = cylinder(
        DVec3::ZERO,
        DVec3::new(0.0, 0.0, 0.1),
        0.01,
        &Tessellation::default(),
        OrganLabel::Stem,
        MaterialSlot::stem(),
    )?;
    println!("cylinder: {} triangles, watertight {}", straight.triangles.len(), straight.is_watertight());

    // An open, cupped blade that bends down towards its tip.
    let mut leaf = LeafSpec::new(0.08, 0.03);
    leaf.width_profile = FunctionCurve::new(&[(0.0, 0.2), (0.35, 1.0), (1.0, 0.05)])?;
    leaf.bend = FunctionCurve::new(&[(0.0, -10.0), (1.0, 50.0)])?;
    leaf.section = CrossSection::blade(11, 0.2);
    let blade = leaf.build()?;
    println!("leaf: {} triangles, open edges {}", blade.triangles.len(), blade.boundary_edge_count());

    let objects = [
        ObjObject { name: "stem".into(), mesh: &stem },
        ObjObject { name: "cylinder".into(), mesh: &straight },
        ObjObject { name: "leaf".into(), mesh: &blade },
    ];
    write_obj(&mut std::io::BufWriter::new(std::fs::File::create(&out)?), &objects)?;
    println!("wrote {out}");
    Ok(())
}
