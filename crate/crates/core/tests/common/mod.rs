//! Helpers shared by the integration tests: small fixtures and independent
//! reference implementations.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use soyfield::field::{LibraryConfig, PlantLibrary, SoilTextureSet};
use soyfield::plants::PlantParams;

/// A small plant library shared by every test in one binary.
pub fn library() -> Arc<PlantLibrary> {
    static LIB: OnceLock<Arc<PlantLibrary>> = OnceLock::new();
    LIB.get_or_init(|| {
        let cfg = LibraryConfig {
            size: 8,
            ..LibraryConfig::default()
        };
        Arc::new(PlantLibrary::generate(&PlantParams::default(), PlantLibrary::procedural_atlases(5), &cfg, 5).unwrap())
    })
    .clone()
}

pub fn soil_textures() -> Arc<SoilTextureSet> {
    static TEX: OnceLock<Arc<SoilTextureSet>> = OnceLock::new();
    TEX.get_or_init(|| Arc::new(SoilTextureSet::procedural(3, 32, 2))).clone()
}

/// Plain string rewriting of a context-free, deterministic grammar.
pub fn rewrite(axiom: &str, rules: &HashMap<char, &str>, steps: usize) -> String {
    let mut s = axiom.to_string();
    for _ in 0..steps {
        s = s.chars().map(|c| rules.get(&c).map_or(c.to_string(), |r| r.to_string())).collect();
    }
    s
}

/// Solar position after the NOAA solar calculator spreadsheet: Julian
/// century, geometric mean longitude and anomaly, equation of centre,
/// apparent longitude, corrected obliquity. Returns (azimuth, elevation)
/// in degrees without refraction.
pub fn noaa_spreadsheet(lat: f64, lon: f64, y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> (f64, f64) {
    let (mut yy, mut mm) = (y as f64, mo as f64);
    if mo <= 2 {
        yy -= 1.0;
        mm += 12.0;
    }
    let a = (yy / 100.0).floor();
    let b = 2.0 - a + (a / 4.0).floor();
    let day_frac = (h as f64 + mi as f64 / 60.0 + s as f64 / 3600.0) / 24.0;
    let jd = (365.25 * (yy + 4716.0)).floor() + (30.6001 * (mm + 1.0)).floor() + d as f64 + b - 1524.5 + day_frac;
    let jc = (jd - 2451545.0) / 36525.0;
    let r = f64::to_radians;
    let l0 = (280.46646 + jc * (36000.76983 + jc * 0.0003032)).rem_euclid(360.0);
    let m = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    let e = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
    let c = r(m).sin() * (1.914602 - jc * (0.004817 + 0.000014 * jc))
        + r(2.0 * m).sin() * (0.019993 - 0.000101 * jc)
        + r(3.0 * m).sin() * 0.000289;
    let true_long = l0 + c;
    let omega = 125.04 - 1934.136 * jc;
    let app_long = true_long - 0.00569 - 0.00478 * r(omega).sin();
    let mean_obliq = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    let obliq = mean_obliq + 0.00256 * r(omega).cos();
    let decl = (r(obliq).sin() * r(app_long).sin()).asin();
    let vy = r(obliq / 2.0).tan().powi(2);
    let eot = 4.0
        * (vy * (2.0 * r(l0)).sin() - 2.0 * e * r(m).sin() + 4.0 * e * vy * r(m).sin() * (2.0 * r(l0)).cos()
            - 0.5 * vy * vy * (4.0 * r(l0)).sin()
            - 1.25 * e * e * (2.0 * r(m)).sin())
        .to_degrees();
    let tst = (day_frac * 1440.0 + eot + 4.0 * lon).rem_euclid(1440.0);
    let ha = if tst / 4.0 < 0.0 { tst / 4.0 + 180.0 } else { tst / 4.0 - 180.0 };
    let phi = r(lat);
    let cos_z = (phi.sin() * decl.sin() + phi.cos() * decl.cos() * r(ha).cos()).clamp(-1.0, 1.0);
    let zen = cos_z.acos();
    let acos_arg = ((phi.sin() * zen.cos() - decl.sin()) / (phi.cos() * zen.sin())).clamp(-1.0, 1.0);
    let az = if ha > 0.0 {
        (acos_arg.acos().to_degrees() + 180.0).rem_euclid(360.0)
    } else {
        (540.0 - acos_arg.acos().to_degrees()).rem_euclid(360.0)
    };
    (az, 90.0 - zen.to_degrees())
}

/// Smallest absolute difference between two angles in degrees.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}
