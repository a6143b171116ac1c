//! Generate a small dataset, then verify it.
//!
//! cargo run --release --example generate_dataset -- /tmp/dataset

use std::path::PathBuf;

use soyfield::dataset::{generate_dataset, manifest_path, verify_dataset, GeneratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "dataset".into()));
    let cfg = GeneratorConfig::from_toml(&format!(
        "seed = 11\ncount = 4\nout = {:?}\n[camera]\nwidth = 256\nimage_height = 256\n",
        out.display().to_string()
    ))?;
    let m = generate_dataset(&cfg)?;
    for s in &m.scenes {
        println!(
            "{}: crops {}, weeds {}, dormant {}, debris {}, soil {}, sun el {:.1}",
            s.id,
            s.plant_counts.crop,
            s.plant_counts.weeds(),
            s.dormant_count,
            s.debris_count,
            s.soil_preset,
            s.sun.elevation
        );
    }
    let report = verify_dataset(&manifest_path(&out))?;
    println!("verify: {} scenes, {} violations", report.scenes, report.violations.len());
    Ok(())
}
