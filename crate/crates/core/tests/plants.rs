use std::path::Path;

use glam::Vec2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soyfield::plants::{
    assign_leaf_textures, grow, grow_broadleaf_weed, grow_grassy_weed, grow_soybean, LeafKind, LsysSpeciesParams,
    MaterialRanges, PlantError, PlantParams, SoybeanParams, SoybeanSchedule, Species, TextureAtlas,
};

fn opened_trifoliates(a: &soyfield::plants::PlantAssembly) -> usize {
    a.leaves.iter().filter(|l| l.kind == LeafKind::Trifoliate && l.opened).count()
}

#[test]
fn soybean_stays_inside_the_growth_envelope() {
    let p = SoybeanParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let age = rand::Rng::random_range(&mut rng, 5.0..=35.0);
        let seed = rand::Rng::random::<u64>(&mut rng);
        let a = grow_soybean(age, seed, &p).unwrap();
        assert!(a.height <= 0.36 + 1e-12, "age {age} seed {seed}: height {}", a.height);
        assert!(opened_trifoliates(&a) <= 6);
        assert!(a.leaf_count <= 6);
    }
}

#[test]
fn soybean_at_end_of_window() {
    let p = SoybeanParams::default();
    for seed in 0..20 {
        let a = grow_soybean(35.0, seed, &p).unwrap();
        // Six trifoliates emerged, the unifoliate pair counts as one opened leaf.
        let emerged = a.leaves.iter().filter(|l| l.kind == LeafKind::Trifoliate).count();
        assert_eq!(emerged, 6);
        assert!(a.height > 0.25 && a.height <= 0.36);
    }
}

#[test]
fn schedule_bounds_opened_leaves() {
    let p = SoybeanParams::default();
    for shift in [-0.5, 0.0, 0.5] {
        let s = SoybeanSchedule::new(&p, shift);
        let mut prev = 0;
        for i in 0..=300 {
            let age = 5.0 + i as f64 * 0.1;
            let n = s.opened_leaves(age);
            assert!(n >= prev && n <= 6);
            prev = n;
        }
    }
}

#[test]
fn out_of_window_ages_are_rejected() {
    let p = SoybeanParams::default();
    for age in [4.99, 35.01, f64::NAN] {
        assert!(matches!(grow_soybean(age, 1, &p), Err(PlantError::AgeOutOfWindow { .. })));
    }
}

#[test]
fn grassy_leaves_alternate_sides() {
    let p = LsysSpeciesParams::grassy_default();
    for seed in 0..100u64 {
        let age = 6.0 + (seed % 25) as f64;
        let a = grow_grassy_weed(age, seed, &p).unwrap();
        assert!(a.leaves.len() >= 2, "seed {seed}");
        for w in a.leaves.windows(2) {
            let d = (w[1].azimuth_deg - w[0].azimuth_deg).rem_euclid(360.0);
            // Opposite sides with two jitters of at most 12 degrees each.
            assert!((d - 180.0).abs() <= 24.0 + 1e-9, "seed {seed}: step {d}");
        }
    }
}

#[test]
fn broadleaf_branches_start_at_leaf_nodes() {
    let p = LsysSpeciesParams::broadleaf_default();
    for seed in 0..30u64 {
        let a = grow_broadleaf_weed(25.0, seed, &p).unwrap();
        assert!(!a.branches.is_empty());
        for b in &a.branches {
            let nearest = a.leaves.iter().map(|l| l.node.distance(b.origin)).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-6, "seed {seed}: branch at {:?} is {nearest} from any leaf node", b.origin);
        }
    }
}

#[test]
fn weeds_grow_with_age() {
    let params = PlantParams::default();
    for sp in [Species::GrassyWeed, Species::BroadleafWeed] {
        let young = grow(sp, 5.0, 3, &params).unwrap();
        let old = grow(sp, 25.0, 3, &params).unwrap();
        assert!(old.leaves.len() > young.leaves.len(), "{sp}");
        assert!(old.footprint_radius > young.footprint_radius, "{sp}");
    }
}

#[test]
fn growth_is_deterministic() {
    let params = PlantParams::default();
    for sp in Species::ALL {
        let a = grow(sp, 20.0, 42, &params).unwrap();
        let b = grow(sp, 20.0, 42, &params).unwrap();
        let c = grow(sp, 20.0, 43, &params).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a, b);
        assert_ne!(a.fingerprint(), c.fingerprint(), "{sp}");
    }
}

#[test]
fn meshes_are_valid_and_labelled() {
    let params = PlantParams::default();
    for sp in Species::ALL {
        let a = grow(sp, 30.0, 9, &params).unwrap();
        assert_eq!(a.semantic_class, sp.semantic_class());
        for m in &a.meshes {
            m.validate().unwrap();
        }
        let (lo, _) = a.bounds().unwrap();
        assert!(lo.z > -0.05, "{sp} reaches {} below the soil", lo.z);
    }
}

#[test]
fn shipped_parameter_files_match_the_defaults() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("params");
    assert_eq!(PlantParams::load_dir(&dir).unwrap(), PlantParams::default());
}

#[test]
fn parameter_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("soybean.toml"), "height_cap = 0.2\n").unwrap();
    std::fs::write(dir.path().join("grassy_weed.toml"), "[constants]\nmax_leaves = 3\n").unwrap();
    let p = PlantParams::load_dir(dir.path()).unwrap();
    assert_eq!(p.soybean.height_cap, 0.2);
    assert_eq!(p.broadleaf_weed, LsysSpeciesParams::broadleaf_default());
    let g = grow_grassy_weed(30.0, 1, &p.grassy_weed).unwrap();
    assert_eq!(g.leaves.len(), 3);
    let s = grow_soybean(35.0, 1, &p.soybean).unwrap();
    assert!(s.height <= 0.2);

    std::fs::write(dir.path().join("soybean.toml"), "height_cap = 0.2\nbogus = 1\n").unwrap();
    assert!(PlantParams::load_dir(dir.path()).is_err());
}

#[test]
fn atlas_cells_tile_the_unit_square() {
    let atlas = TextureAtlas::procedural(Species::BroadleafWeed, 1, 2, 4, 16);
    let mut area = 0.0;
    for c in 0..atlas.cell_count() {
        let r = atlas.cell_rect(c);
        area += (r.max[0] - r.min[0]) * (r.max[1] - r.min[1]);
        for d in (c + 1)..atlas.cell_count() {
            let o = atlas.cell_rect(d);
            let overlap_x = r.max[0].min(o.max[0]) - r.min[0].max(o.min[0]);
            let overlap_y = r.max[1].min(o.max[1]) - r.min[1].max(o.min[1]);
            assert!(overlap_x <= 0.0 || overlap_y <= 0.0);
        }
    }
    assert!((area - 1.0).abs() < 1e-6);
    // Cell centres are leaf, corners are cut out.
    for c in 0..atlas.cell_count() {
        let r = atlas.cell_rect(c);
        let centre = Vec2::new(0.5 * (r.min[0] + r.max[0]), 0.5 * (r.min[1] + r.max[1]));
        assert!(atlas.is_opaque(centre));
        assert!(!atlas.is_opaque(Vec2::new(r.min[0] + 1e-3, r.min[1] + 1e-3)));
    }
}

#[test]
fn atlas_round_trips_through_disk() {
    let atlas = TextureAtlas::procedural(Species::GrassyWeed, 7, 2, 2, 16);
    let dir = tempfile::tempdir().unwrap();
    atlas.save(dir.path()).unwrap();
    assert_eq!(TextureAtlas::load(dir.path()).unwrap(), atlas);
}

#[test]
fn leaf_textures_land_inside_their_cells() {
    let atlas = TextureAtlas::procedural(Species::Soybean, 2, 2, 4, 16);
    let plant = grow_soybean(30.0, 5, &SoybeanParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ranges = MaterialRanges::default();
    let t = assign_leaf_textures(&plant, &atlas, &mut rng, &ranges).unwrap();
    let mut used = std::collections::BTreeSet::new();
    for m in t.leaf_meshes() {
        let cell = m.material.cell.unwrap();
        used.insert(cell);
        let r = atlas.cell_rect(cell);
        for uv in &m.uvs {
            assert!(uv.x >= r.min[0] - 1e-6 && uv.x <= r.max[0] + 1e-6);
            assert!(uv.y >= r.min[1] - 1e-6 && uv.y <= r.max[1] + 1e-6);
        }
        assert!((ranges.brightness.0..=ranges.brightness.1).contains(&m.material.brightness));
    }
    assert!(used.len() > 1);
    // Geometry is untouched.
    for (a, b) in plant.meshes.iter().zip(&t.meshes) {
        assert_eq!(a.positions, b.positions);
    }
    let grassy = TextureAtlas::procedural(Species::GrassyWeed, 2, 1, 1, 8);
    assert!(matches!(
        assign_leaf_textures(&plant, &grassy, &mut rng, &ranges),
        Err(PlantError::AtlasMismatch { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn soybean_height_is_monotone_in_age(seed in any::<u64>(), a in 5.0f64..35.0, b in 5.0f64..35.0) {
        let p = SoybeanParams::default();
        let (young, old) = if a <= b { (a, b) } else { (b, a) };
        let hy = grow_soybean(young, seed, &p).unwrap().height;
        let ho = grow_soybean(old, seed, &p).unwrap().height;
        prop_assert!(hy <= ho + 1e-12, "{young}: {hy} > {old}: {ho}");
    }

    #[test]
    fn opened_leaves_never_decrease(seed in any::<u64>(), a in 5.0f64..35.0, b in 5.0f64..35.0) {
        let p = SoybeanParams::default();
        let (young, old) = if a <= b { (a, b) } else { (b, a) };
        let ly = grow_soybean(young, seed, &p).unwrap().leaf_count;
        let lo = grow_soybean(old, seed, &p).unwrap().leaf_count;
        prop_assert!(ly <= lo);
    }
}
