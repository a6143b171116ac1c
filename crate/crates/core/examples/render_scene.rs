//! Compose and render one scene, writing every channel as PNG.
//!
//! cargo run --release --example render_scene -- /tmp/render 7

use std::path::PathBuf;

use soyfield::dataset::{generate_scene, GeneratorConfig, RunAssets};
use soyfield::render::Channel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().cloned().unwrap_or_else(|| "render".into()));
    let index: usize = args.get(1).map_or(Ok(0), |s| s.parse())?;
    let mut cfg = GeneratorConfig::default();
    cfg.library.size = 16;
    let assets = RunAssets::prepare(&cfg)?;
    let s = generate_scene(&cfg, &assets, index)?;
    let cam = &s.record.camera;
    println!(
        "camera at ({:.2}, {:.2}, {:.2}) fov {:.1}; sun az {:.1} el {:.1}",
        cam.position.x, cam.position.y, cam.position.z, cam.fov_deg, s.record.sun.azimuth, s.record.sun.elevation
    );
    println!("visible pixels per class: {:?}", s.outputs.class_pixel_counts());
    for (c, p) in s.outputs.save(&out, &Channel::ALL)? {
        println!("{c}: {}", p.display());
    }
    Ok(())
}
