//! Grow each species over its age window and print summary statistics.
//!
//! cargo run --release --example grow_plants

use soyfield::plants::{grow, PlantParams, Species};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PlantParams::default();
    for sp in Species::ALL {
        println!("{sp}");
        for age in [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0] {
            let p = match grow(sp, age, 7, &params) {
                Ok(p) => p,
                Err(e) => {
                    println!("  age {age:>4}: {e}");
                    continue;
                }
            };
            println!(
                "  age {age:>4}: height {:.3} m, {:>2} leaves, {:>2} branches, footprint {:.3} m, {:>6} triangles",
                p.height,
                p.leaf_count,
                p.branches.len(),
                p.footprint_radius,
                p.triangle_count()
            );
        }
    }
    Ok(())
}
