//! Build procedural leaf atlases, derive their secondary maps and texture a
//! plant from one of them.
//!
//! cargo run --release --example texture_atlas -- /tmp/atlases

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soyfield::plants::{assign_leaf_textures, grow, MaterialRanges, PlantParams, Species, TextureAtlas};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "atlases".into()));
    for sp in Species::ALL {
        let atlas = TextureAtlas::procedural(sp, 3, 2, 4, 64);
        atlas.save(&dir.join(sp.name()))?;
        println!("{sp}: {} cells, saved to {}", atlas.cell_count(), dir.join(sp.name()).display());
    }
    let atlas = TextureAtlas::load(&dir.join("soybean"))?;
    let plant = grow(Species::Soybean, 25.0, 1, &PlantParams::default())?;
    let textured = assign_leaf_textures(&plant, &atlas, &mut ChaCha8Rng::seed_from_u64(2), &MaterialRanges::default())?;
    for m in textured.leaf_meshes().take(4) {
        println!("leaf cell {:?}, tint {:?}, brightness {:.2}", m.material.cell, m.material.tint, m.material.brightness);
    }
    Ok(())
}
