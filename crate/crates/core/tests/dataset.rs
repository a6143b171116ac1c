use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use image::Rgb;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use soyfield::dataset::{
    generate_dataset, manifest_path, sample_sun, scene_dir_name, verify_dataset, DatasetError, DatasetManifest,
    GeneratorConfig, SunConfig, ViolationKind,
};
use soyfield::field::FieldError;
use soyfield::render::Channel;

/// A small, fast configuration writing into `out`.
fn small(out: &Path) -> GeneratorConfig {
    let mut cfg = GeneratorConfig::from_toml(
        r#"
        seed = 11
        count = 4
        [library]
        size = 3
        [camera]
        width = 96
        image_height = 72
        [assets]
        soil_texture_px = 32
        soil_variants = 2
        atlas_cell_px = 16
        "#,
    )
    .unwrap();
    cfg.out = out.to_path_buf();
    cfg
}

fn file_hashes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            for f in std::fs::read_dir(&p).unwrap() {
                let f = f.unwrap().path();
                let rel = f.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, Sha256::digest(std::fs::read(&f).unwrap()).to_vec());
            }
        }
    }
    out
}

#[test]
fn empty_config_means_defaults() {
    assert_eq!(GeneratorConfig::from_toml("").unwrap(), GeneratorConfig::default());
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let text = std::fs::read_to_string(shipped).unwrap();
    assert_eq!(GeneratorConfig::from_toml(&text).unwrap(), GeneratorConfig::default());
    let large = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/large.toml");
    let cfg = soyfield::dataset::load_config(&large).unwrap();
    assert_eq!(cfg.count, 12_000);
}

#[test]
fn out_of_envelope_spacing_is_refused() {
    let e = GeneratorConfig::from_toml("[field.layout]\nrow_spacing = [0.2, 0.3]\n").unwrap_err();
    let msg = e.to_string();
    assert!(msg.contains("row_spacing") && msg.contains("0.38") && msg.contains("0.76"), "{msg}");
    assert!(matches!(e, DatasetError::Field(FieldError::OutOfEnvelope { .. })));
    assert_eq!(e.exit_code(), 1);

    let cfg = GeneratorConfig::from_toml("allow_out_of_envelope = true\n[field.layout]\nrow_spacing = [0.2, 0.3]\n").unwrap();
    assert!(cfg.effective_field().layout.allow_out_of_envelope);
}

#[test]
fn override_is_flagged_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.count = 1;
    cfg.allow_out_of_envelope = true;
    cfg.field.layout.row_spacing = (0.25, 0.3);
    let m = generate_dataset(&cfg).unwrap();
    assert!(m.out_of_envelope);
    assert!(m.scenes[0].layout.row_spacing < 0.38);
}

#[test]
fn config_errors_name_the_key() {
    for (text, key) in [
        ("count = 0", "count"),
        ("channels = []", "channels"),
        ("[sun]\ndates = [\"2024-07-01\", \"2024-06-01\"]", "sun.dates"),
        ("[library]\nsize = 0", "library.size"),
    ] {
        match GeneratorConfig::from_toml(text) {
            Err(DatasetError::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    assert!(matches!(GeneratorConfig::from_toml("bogus = 1"), Err(DatasetError::Parse(_))));
    assert!(matches!(GeneratorConfig::from_toml("count = \"x\""), Err(DatasetError::Parse(_))));
}

#[test]
fn sampled_suns_are_high_enough() {
    let cfg = SunConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let s = sample_sun(&cfg, &mut rng).unwrap();
        let p = s.position().unwrap();
        assert!(p.elevation >= 15.0);
        assert!((36.0..=44.0).contains(&s.latitude) && (-97.0..=-82.0).contains(&s.longitude));
    }
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut ca = small(a.path());
    ca.jobs = 1;
    let mut cb = small(b.path());
    cb.jobs = 8;
    let mut cc = small(c.path());
    cc.jobs = 1;
    cc.seed += 1;
    let (ma, mb) = (generate_dataset(&ca).unwrap(), generate_dataset(&cb).unwrap());
    generate_dataset(&cc).unwrap();
    let (ha, hb, hc) = (file_hashes(a.path()), file_hashes(b.path()), file_hashes(c.path()));
    assert_eq!(ha.len(), 4 * 5);
    assert_eq!(ha, hb);
    assert_ne!(ha, hc);
    assert_eq!(ma.scenes, mb.scenes);

    // A rerun into the same directory rewrites identical bytes.
    generate_dataset(&ca).unwrap();
    assert_eq!(file_hashes(a.path()), ha);
}

#[test]
fn layout_of_the_output_tree() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.channels = vec![Channel::Rgb, Channel::Semantic];
    let m = generate_dataset(&cfg).unwrap();
    assert!(manifest_path(dir.path()).exists());
    assert!(!dir.path().join("manifest.json.tmp").exists());
    for (i, rec) in m.scenes.iter().enumerate() {
        assert_eq!(rec.id, scene_dir_name(i));
        assert_eq!(rec.id, format!("scene_{i:06}"));
        let files: Vec<String> = std::fs::read_dir(dir.path().join(&rec.id))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        let mut files = files;
        files.sort();
        assert_eq!(files, ["rgb.png", "semantic.png"]);
        assert_eq!(rec.files[&Channel::Rgb], format!("{}/rgb.png", rec.id));
        assert_eq!(
            rec.plant_counts.crop + rec.dormant_count,
            rec.layout.rows * rec.layout.plants_per_row
        );
        assert_eq!(rec.plant_counts.weeds(), rec.layout.weed_count);
        assert!(rec.sun.elevation >= 15.0);
    }
    let reread = DatasetManifest::load(&manifest_path(dir.path())).unwrap();
    assert_eq!(reread, m);
    assert!(verify_dataset(&manifest_path(dir.path())).unwrap().is_clean());
}

fn generated() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&small(dir.path())).unwrap();
    let m = manifest_path(dir.path());
    (dir, m)
}

fn kinds(manifest: &Path) -> Vec<ViolationKind> {
    verify_dataset(manifest).unwrap().violations.into_iter().map(|v| v.kind).collect()
}

#[test]
fn clean_dataset_verifies() {
    let (_dir, m) = generated();
    let r = verify_dataset(&m).unwrap();
    assert_eq!(r.scenes, 4);
    assert!(r.is_clean(), "{:?}", r.violations);
}

#[test]
fn off_palette_pixel_is_caught() {
    let (dir, m) = generated();
    let p = dir.path().join("scene_000001/semantic.png");
    let mut img = image::open(&p).unwrap().to_rgb8();
    img.put_pixel(5, 5, Rgb([17, 0, 0]));
    img.save(&p).unwrap();
    assert!(kinds(&m).contains(&ViolationKind::Palette));
}

#[test]
fn relabelled_pixel_breaks_alignment() {
    let (dir, m) = generated();
    let p = dir.path().join("scene_000002/semantic.png");
    let mut img = image::open(&p).unwrap().to_rgb8();
    // Paint one background pixel as crop; depth and instance disagree.
    let (x, y) = (0..img.height())
        .flat_map(|y| (0..img.width()).map(move |x| (x, y)))
        .find(|&(x, y)| img.get_pixel(x, y).0 == [0, 0, 0])
        .unwrap();
    img.put_pixel(x, y, Rgb([255, 0, 0]));
    img.save(&p).unwrap();
    let k = kinds(&m);
    assert!(k.contains(&ViolationKind::Alignment), "{k:?}");
}

#[test]
fn tampered_counts_are_caught() {
    let (_dir, m) = generated();
    let mut manifest = DatasetManifest::load(&m).unwrap();
    manifest.scenes[0].plant_counts.crop -= 1;
    manifest.save(&m).unwrap();
    assert!(kinds(&m).contains(&ViolationKind::Counts));

    let (_dir2, m2) = generated();
    let mut manifest = DatasetManifest::load(&m2).unwrap();
    manifest.scenes[1].pixel_counts.crop += 1;
    manifest.save(&m2).unwrap();
    assert!(kinds(&m2).contains(&ViolationKind::Counts));
}

#[test]
fn stray_files_are_reported() {
    let (dir, m) = generated();
    std::fs::write(dir.path().join("scene_000000/extra.png"), b"x").unwrap();
    assert!(kinds(&m).contains(&ViolationKind::Unreferenced));
}

#[test]
fn missing_files_are_an_error() {
    let (dir, m) = generated();
    std::fs::remove_file(dir.path().join("scene_000003/depth.png")).unwrap();
    let e = verify_dataset(&m).unwrap_err();
    assert!(matches!(e, DatasetError::MissingFile(_)));
    assert_eq!(e.exit_code(), 2);
    let e = verify_dataset(&dir.path().join("nope.json")).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

fn cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_soyfield")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn command_line_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg_path,
        "count = 2\n[library]\nsize = 2\n[camera]\nwidth = 48\nimage_height = 32\n[assets]\nsoil_texture_px = 16\nsoil_variants = 2\natlas_cell_px = 8\n",
    )
    .unwrap();
    let out = dir.path().join("ds");
    let (cfg_s, out_s) = (cfg_path.to_str().unwrap(), out.to_str().unwrap());
    assert_eq!(cli(&["generate", "--config", cfg_s, "--out", out_s, "--channels", "rgb,semantic,depth,instance", "--jobs", "2"]), 0);
    let manifest = out.join("manifest.json");
    let m = DatasetManifest::load(&manifest).unwrap();
    assert_eq!(m.scenes.len(), 2);
    assert!(!m.scenes[0].files.contains_key(&Channel::Normal));
    assert_eq!(cli(&["verify", "--manifest", manifest.to_str().unwrap()]), 0);

    std::fs::write(out.join("scene_000000/stray.txt"), "x").unwrap();
    assert_eq!(cli(&["verify", "--manifest", manifest.to_str().unwrap()]), 1);
    assert_eq!(cli(&["verify", "--manifest", dir.path().join("absent.json").to_str().unwrap()]), 2);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[field.layout]\nrow_spacing = [0.2, 0.3]\n").unwrap();
    assert_eq!(cli(&["generate", "--config", bad.to_str().unwrap(), "--out", out_s]), 1);
    assert_eq!(cli(&["generate", "--config", dir.path().join("none.toml").to_str().unwrap()]), 2);
    assert_eq!(cli(&["generate", "--channels", "ultraviolet"]), 1);

    let obj = dir.path().join("plant.obj");
    assert_eq!(cli(&["preview", "--species", "soybean", "--age", "20", "--out", obj.to_str().unwrap()]), 0);
    assert!(std::fs::read_to_string(&obj).unwrap().lines().any(|l| l.starts_with("f ")));
    assert_eq!(cli(&["preview", "--species", "soybean", "--age", "80", "--out", obj.to_str().unwrap()]), 1);
    assert_eq!(cli(&["preview", "--species", "corn", "--age", "20", "--out", obj.to_str().unwrap()]), 1);
}
