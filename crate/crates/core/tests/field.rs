mod common;

use glam::DVec2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soyfield::field::{
    adjacent_repeats, compose_field, fbm_perlin, morisita_index, sample_layout, scatter_debris, tile_soil,
    DebrisConfig, FieldConfig, FieldError, LayoutConfig, TileAssignment, WeedPlacementMode,
};
use soyfield::plants::{SemanticClass, Species};

fn config(f: impl FnOnce(&mut FieldConfig)) -> FieldConfig {
    let mut c = FieldConfig::default();
    f(&mut c);
    c
}

fn scene(cfg: &FieldConfig, seed: u64) -> soyfield::field::FieldScene {
    compose_field(cfg, common::library(), common::soil_textures(), seed).unwrap()
}

#[test]
fn fbm_roughness_falls_with_gain() {
    // Mean absolute second difference over a grid: high octaves add detail
    // in proportion to the gain.
    let detail = |gain: f64| {
        let v = |x: i32, y: i32| fbm_perlin(DVec2::new(x as f64, y as f64) * 0.11, 5, 2.0, gain, 17).unwrap();
        let mut sum = 0.0;
        for y in 0..64 {
            for x in 1..63 {
                sum += (v(x + 1, y) - 2.0 * v(x, y) + v(x - 1, y)).abs();
            }
        }
        sum
    };
    let gains = [0.5, 0.4, 0.3, 0.2, 0.1];
    let d: Vec<f64> = gains.iter().map(|&g| detail(g)).collect();
    for w in d.windows(2) {
        assert!(w[1] < w[0], "{d:?}");
    }
}

fn repeats_oracle(t: &[TileAssignment], w: usize, h: usize) -> usize {
    let mut n = 0;
    for y in 0..h {
        for x in 0..w {
            for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                if t[ny as usize * w + nx as usize] == t[y * w + x] {
                    n += 1;
                }
            }
        }
    }
    n / 2
}

#[test]
fn soil_tiling_never_repeats_across_an_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (w, h) = (rng.random_range(1..24), rng.random_range(1..24));
        let patches = rng.random_range(2..6);
        let t = tile_soil(w, h, patches, &mut rng).unwrap();
        assert_eq!(t.len(), w * h);
        assert!(t.iter().all(|a| (a.patch as usize) < patches && a.rotation < 4));
        assert_eq!(repeats_oracle(&t, w, h), 0);
        assert_eq!(adjacent_repeats(&t, w, h), 0);
    }
    assert!(matches!(tile_soil(3, 3, 1, &mut rng), Err(FieldError::NotEnoughPatches(1))));
}

#[test]
fn scene_soil_tiles_do_not_repeat() {
    for seed in 0..10 {
        let s = scene(&FieldConfig::default(), seed);
        let soil = &s.soil;
        assert_eq!(repeats_oracle(&soil.tiles, soil.tiles_x, soil.tiles_y), 0);
    }
}

#[test]
fn full_stand_without_dormancy() {
    let cfg = config(|c| {
        c.layout.dormancy_fraction = (0.0, 0.0);
        c.layout.allow_out_of_envelope = true;
    });
    for seed in 0..20 {
        let s = scene(&cfg, seed);
        let l = &s.layout;
        assert_eq!(s.count(SemanticClass::Crop), l.rows * l.plants_per_row);
        assert!(s.dormant.is_empty());
        assert_eq!(l.rows, (1.6 / l.row_spacing).floor() as usize);
        assert_eq!(l.plants_per_row, (1.2 / l.plant_spacing).floor() as usize);
    }
}

#[test]
fn pooled_dormancy_matches_the_rate() {
    let cfg = config(|c| c.layout.dormancy_fraction = (0.125, 0.125));
    let (mut missing, mut slots) = (0usize, 0usize);
    for seed in 0..10_000 {
        let s = scene(&cfg, seed);
        missing += s.dormant.len();
        slots += s.layout.rows * s.layout.plants_per_row;
        assert_eq!(s.dormant.len() + s.count(SemanticClass::Crop), s.layout.rows * s.layout.plants_per_row);
    }
    let p = 0.125;
    let f = missing as f64 / slots as f64;
    let sigma = (p * (1.0 - p) / slots as f64).sqrt();
    assert!((f - p).abs() <= 3.0 * sigma, "pooled {f} over {slots} slots, 3 sigma = {}", 3.0 * sigma);
}

#[test]
fn sampled_layouts_respect_envelopes() {
    let cfg = LayoutConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut modes = std::collections::BTreeSet::new();
    for _ in 0..1000 {
        let l = sample_layout(&cfg, &mut rng).unwrap();
        assert!((0.38..=0.76).contains(&l.row_spacing));
        assert!((0.05..=0.10).contains(&l.plant_spacing));
        assert!((0.10..=0.15).contains(&l.dormancy_fraction));
        assert!((1..=10).contains(&l.weed_count));
        modes.insert(format!("{:?}", l.weed_placement));
    }
    assert_eq!(modes.len(), 3);
}

#[test]
fn out_of_envelope_requests_are_refused_unless_overridden() {
    let mut cfg = LayoutConfig {
        row_spacing: (0.2, 0.3),
        ..LayoutConfig::default()
    };
    let msg = cfg.validate().unwrap_err().to_string();
    assert!(msg.contains("row_spacing") && msg.contains("0.38"), "{msg}");
    cfg.allow_out_of_envelope = true;
    cfg.validate().unwrap();
    let bad_weeds = LayoutConfig {
        weed_count: (0, 12),
        ..LayoutConfig::default()
    };
    assert!(matches!(bad_weeds.validate(), Err(FieldError::OutOfEnvelope { key: "weed_count", .. })));
}

#[test]
fn between_row_weeds_clear_the_rows() {
    let cfg = config(|c| c.layout.weed_placement = WeedPlacementMode::BetweenRows);
    for seed in 0..60 {
        let s = scene(&cfg, seed);
        if s.layout.rows < 2 {
            continue;
        }
        for w in s.instances.iter().filter(|i| i.species != Species::Soybean) {
            let x = w.placement.position.x;
            let d = (0..s.layout.rows).map(|r| (x - s.layout.row_x(r)).abs()).fold(f64::INFINITY, f64::min);
            assert!(d >= s.layout.row_spacing / 3.0 - 1e-9);
            let smallest = s.library.plants[&w.species].iter().map(|p| p.footprint_radius).fold(f64::INFINITY, f64::min);
            assert!(w.footprint_radius < d || w.footprint_radius == smallest, "seed {seed}: {} vs {d}", w.footprint_radius);
        }
    }
}

#[test]
fn within_row_weeds_sit_on_rows_between_slots() {
    let cfg = config(|c| c.layout.weed_placement = WeedPlacementMode::WithinRows);
    for seed in 0..30 {
        let s = scene(&cfg, seed);
        for w in s.instances.iter().filter(|i| i.species != Species::Soybean) {
            let p = w.placement.position;
            assert!((0..s.layout.rows).any(|r| (p.x - s.layout.row_x(r)).abs() < 1e-9));
            if s.layout.plants_per_row >= 2 {
                let k = (0..s.layout.plants_per_row - 1)
                    .map(|k| (p.y - 0.5 * (s.layout.slot_y(k) + s.layout.slot_y(k + 1))).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(k < 1e-9);
            }
        }
    }
}

#[test]
fn plants_rest_on_the_soil() {
    for seed in 0..20 {
        let s = scene(&FieldConfig::default(), seed);
        for inst in &s.instances {
            let p = inst.placement.position;
            assert!((p.z - s.soil.height_at(p.truncate())).abs() < 1e-3);
            // The lowest stem vertex meets the soil at the planting point.
            let low = s
                .assembly(inst)
                .meshes
                .iter()
                .flat_map(|m| m.positions.iter())
                .map(|v| v.z as f64)
                .fold(f64::INFINITY, f64::min);
            assert!(low.abs() < 1e-3 || inst.species != Species::Soybean, "{low}");
        }
    }
}

#[test]
fn crops_keep_their_spacing() {
    for seed in 0..40 {
        let s = scene(&FieldConfig::default(), seed);
        let l = &s.layout;
        let mut by_row: Vec<Vec<DVec2>> = vec![Vec::new(); l.rows];
        for c in s.instances.iter().filter(|i| i.species == Species::Soybean) {
            let (r, slot) = c.slot.unwrap();
            let p = c.placement.position.truncate();
            let nominal = DVec2::new(l.row_x(r), l.slot_y(slot));
            assert!((p.x - nominal.x).abs() <= 0.3 * l.plant_spacing + 1e-12);
            assert!((p.y - nominal.y).abs() <= 0.3 * l.plant_spacing + 1e-12);
            by_row[r].push(p);
        }
        for row in &by_row {
            for w in row.windows(2) {
                assert!(w[0].distance(w[1]) >= 0.8 * l.plant_spacing - 1e-12, "seed {seed}");
            }
        }
        let (lo, hi) = (l.min() - DVec2::splat(0.5 * l.plant_spacing), l.max() + DVec2::splat(0.5 * l.plant_spacing));
        for i in &s.instances {
            let p = i.placement.position.truncate();
            assert!(p.cmpge(lo).all() && p.cmple(hi).all());
        }
        let ids: Vec<u16> = s.instances.iter().map(|i| i.id).collect();
        assert_eq!(ids, (1..=s.instances.len() as u16).collect::<Vec<_>>());
    }
}

#[test]
fn composition_is_deterministic() {
    let cfg = FieldConfig::default();
    assert!(scene(&cfg, 77) == scene(&cfg, 77));
    assert!(scene(&cfg, 77) != scene(&cfg, 78));
}

#[test]
fn zero_density_gives_no_debris() {
    let cfg = config(|c| c.debris.density = (0.0, 0.0));
    for seed in 0..10 {
        assert!(scene(&cfg, seed).debris.is_empty());
    }
}

#[test]
fn debris_is_deterministic_and_clear_of_stems() {
    let cfg = config(|c| c.debris.density = (0.6, 0.6));
    for seed in 0..10 {
        let s = scene(&cfg, seed);
        let again = scatter_debris(s.clone(), 0.6, &cfg.debris, seed);
        assert_eq!(s.debris, again.debris);
        assert!(!s.debris.is_empty());
        for d in &s.debris {
            let p = d.placement.position.truncate();
            assert!(s.layout.contains(p));
            for c in s.instances.iter().filter(|i| i.species == Species::Soybean) {
                let gap = c.placement.position.truncate().distance(p);
                assert!(gap >= d.radius + c.stem_radius + cfg.debris.stem_clearance);
            }
        }
    }
}

#[test]
fn debris_density_is_monotone() {
    let cfg = FieldConfig::default();
    let s = scene(&cfg, 3);
    let counts: Vec<usize> =
        [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&d| scatter_debris(s.clone(), d, &cfg.debris, 3).debris.len()).collect();
    for w in counts.windows(2) {
        assert!(w[1] >= w[0], "{counts:?}");
    }
}

#[test]
fn debris_is_clustered() {
    let cfg = DebrisConfig::default();
    let base = scene(&FieldConfig::default(), 0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..20 {
        let s = scatter_debris(base.clone(), 0.5, &cfg, seed);
        let pts: Vec<DVec2> = s.debris.iter().map(|d| d.placement.position.truncate()).collect();
        let (lo, hi) = (s.layout.min(), s.layout.max());
        let uniform: Vec<DVec2> =
            (0..pts.len()).map(|_| DVec2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y))).collect();
        let clustered = morisita_index(&pts, lo, hi, 8);
        let baseline = morisita_index(&uniform, lo, hi, 8);
        assert!(clustered > baseline, "seed {seed}: {clustered} vs {baseline} with {} points", pts.len());
    }
}

#[test]
fn morisita_oracle() {
    // Two points in one of four quadrats: 4 * 2 / 2 = 4.
    let pts = [DVec2::new(0.1, 0.1), DVec2::new(0.2, 0.2)];
    assert_eq!(morisita_index(&pts, DVec2::ZERO, DVec2::ONE, 2), 4.0);
    // One point per quadrat: no pairs share a quadrat.
    let grid: Vec<DVec2> = (0..16).map(|k| DVec2::new((k % 4) as f64 + 0.5, (k / 4) as f64 + 0.5) / 4.0).collect();
    assert_eq!(morisita_index(&grid, DVec2::ZERO, DVec2::ONE, 4), 0.0);
}

#[test]
fn soil_moisture_is_neutral_without_amplitude() {
    let cfg = config(|c| c.soil.moisture_amplitude = (0.0, 0.0));
    let s = scene(&cfg, 2);
    for k in 0..50 {
        let p = DVec2::new(k as f64 * 0.07 - 1.7, k as f64 * 0.05 - 1.2);
        assert_eq!(s.soil.moisture_multiplier(p), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn instance_counts_add_up(seed in any::<u64>()) {
        let s = scene(&FieldConfig::default(), seed);
        let l = &s.layout;
        prop_assert_eq!(s.count(SemanticClass::Crop) + s.dormant.len(), l.rows * l.plants_per_row);
        let weeds = s.count(SemanticClass::GrassyWeed) + s.count(SemanticClass::BroadleafWeed);
        prop_assert_eq!(weeds, l.weed_count);
        prop_assert!(s.instances.iter().all(|i| s.library.get(i.species, i.library_index).is_some()));
    }
}
