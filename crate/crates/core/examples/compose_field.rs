//! Compose one field and describe it: layout, counts, soil and debris.
//!
//! cargo run --release --example compose_field -- 42

use std::sync::Arc;

use soyfield::field::{compose_field, morisita_index, FieldConfig, LibraryConfig, PlantLibrary, SoilTextureSet};
use soyfield::plants::{PlantParams, SemanticClass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(42), |s| s.parse())?;
    let lib_cfg = LibraryConfig {
        size: 16,
        ..LibraryConfig::default()
    };
    let library = Arc::new(PlantLibrary::generate(
        &PlantParams::default(),
        PlantLibrary::procedural_atlases(seed),
        &lib_cfg,
        seed,
    )?);
    let soil = Arc::new(SoilTextureSet::procedural(seed, 64, 3));
    let scene = compose_field(&FieldConfig::default(), library, soil, seed)?;
    let l = &scene.layout;
    println!(
        "{} rows x {} slots, row spacing {:.3} m, plant spacing {:.3} m, dormancy {:.3}",
        l.rows, l.plants_per_row, l.row_spacing, l.plant_spacing, l.dormancy_fraction
    );
    println!(
        "crops {} (missing {}), broadleaf {}, grassy {}, placement {:?}",
        scene.count(SemanticClass::Crop),
        scene.dormant.len(),
        scene.count(SemanticClass::BroadleafWeed),
        scene.count(SemanticClass::GrassyWeed),
        l.weed_placement
    );
    println!(
        "soil preset {}, {}x{} tiles, tire track {}",
        scene.soil.preset,
        scene.soil.tiles_x,
        scene.soil.tiles_y,
        scene.soil.tire_track.is_some()
    );
    let pts: Vec<_> = scene.debris.iter().map(|d| d.placement.position.truncate()).collect();
    println!(
        "debris {} at density {:.2}, Morisita index {:.2}",
        pts.len(),
        scene.debris_density,
        morisita_index(&pts, l.min(), l.max(), 16)
    );
    Ok(())
}
