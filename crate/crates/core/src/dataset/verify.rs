use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma, RgbImage};
use serde::Serialize;

use super::manifest::{ClassCounts, DatasetManifest};
use super::DatasetError;
use crate::field::WEED_COUNT_ENVELOPE;
use crate::render::{color_class, Channel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimensions,
    Palette,
    Alignment,
    Counts,
    Envelope,
    Unreferenced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub scene: Option<String>,
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerifyReport {
    pub scenes: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

type Gray16 = ImageBuffer<Luma<u16>, Vec<u16>>;

fn open(path: &Path) -> Result<image::DynamicImage, DatasetError> {
    if !path.exists() {
        return Err(DatasetError::MissingFile(path.display().to_string()));
    }
    image::open(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))
}

/// Re-checks every scene of a dataset: palette exactness, alignment of the
/// semantic, depth and instance channels, and the recorded counts.
pub fn verify_dataset(manifest_path: &Path) -> Result<VerifyReport, DatasetError> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let root = match manifest_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut report = VerifyReport {
        scenes: manifest.scenes.len(),
        violations: Vec::new(),
    };
    let mut referenced: BTreeSet<PathBuf> = BTreeSet::new();
    for rec in &manifest.scenes {
        let mut flag = |kind, message: String| {
            report.violations.push(Violation {
                scene: Some(rec.id.clone()),
                kind,
                message,
            })
        };
        let path = |c: Channel| rec.files.get(&c).map(|f| root.join(f));
        for f in rec.files.values() {
            referenced.insert(root.join(f));
        }
        let semantic: Option<RgbImage> = path(Channel::Semantic).map(|p| open(&p)).transpose()?.map(|i| i.to_rgb8());
        let depth: Option<Gray16> = path(Channel::Depth).map(|p| open(&p)).transpose()?.map(|i| i.to_luma16());
        let instance: Option<Gray16> = path(Channel::Instance).map(|p| open(&p)).transpose()?.map(|i| i.to_luma16());
        for p in [Channel::Rgb, Channel::Normal].into_iter().filter_map(path) {
            let img = open(&p)?;
            if (img.width(), img.height()) != (rec.camera.width, rec.camera.height) {
                flag(ViolationKind::Dimensions, format!("{} is {}x{}", p.display(), img.width(), img.height()));
            }
        }
        let dims = [
            semantic.as_ref().map(|i| i.dimensions()),
            depth.as_ref().map(|i| i.dimensions()),
            instance.as_ref().map(|i| i.dimensions()),
        ];
        if dims.iter().flatten().any(|d| *d != (rec.camera.width, rec.camera.height)) {
            flag(ViolationKind::Dimensions, format!("channel sizes {dims:?} differ from the camera"));
            continue;
        }
        let far_mm = (rec.camera.far * 1000.0).round().min(u16::MAX as f64) as u16;
        let n = (rec.camera.width * rec.camera.height) as usize;
        let mut pixels = ClassCounts::default();
        let mut visible: BTreeMap<u16, ()> = BTreeMap::new();
        let (mut palette_bad, mut align_bad) = (0usize, 0usize);
        let mut first_palette = None;
        let mut first_align = None;
        for i in 0..n {
            let (x, y) = ((i as u32) % rec.camera.width, (i as u32) / rec.camera.width);
            let mut fg: Vec<bool> = Vec::with_capacity(3);
            if let Some(s) = &semantic {
                let c = s.get_pixel(x, y).0;
                match color_class(c) {
                    None => {
                        palette_bad += 1;
                        first_palette.get_or_insert((x, y, c));
                    }
                    Some(class) => {
                        if let Some(class) = class {
                            pixels.add(class, 1);
                        }
                        fg.push(class.is_some());
                        if let (Some(inst), Some(class)) = (&instance, class) {
                            let id = inst.get_pixel(x, y)[0];
                            if rec.instance_classes.get(&id) != Some(&class) {
                                align_bad += 1;
                                first_align.get_or_insert((x, y));
                            }
                        }
                    }
                }
            }
            if let Some(d) = &depth {
                fg.push(d.get_pixel(x, y)[0] < far_mm);
            }
            if let Some(inst) = &instance {
                let id = inst.get_pixel(x, y)[0];
                if id != 0 {
                    visible.insert(id, ());
                }
                fg.push(id != 0);
            }
            if fg.windows(2).any(|w| w[0] != w[1]) {
                align_bad += 1;
                first_align.get_or_insert((x, y));
            }
        }
        if let Some((x, y, c)) = first_palette {
            flag(
                ViolationKind::Palette,
                format!("{palette_bad} semantic pixels outside the palette, first {c:?} at ({x}, {y})"),
            );
        }
        if let Some((x, y)) = first_align {
            flag(
                ViolationKind::Alignment,
                format!("{align_bad} pixels disagree between channels, first at ({x}, {y})"),
            );
        }
        if semantic.is_some() && palette_bad == 0 && pixels != rec.pixel_counts {
            flag(
                ViolationKind::Counts,
                format!("semantic pixel counts {pixels:?} differ from the record {:?}", rec.pixel_counts),
            );
        }
        if instance.is_some() {
            let mut vis = ClassCounts::default();
            for id in visible.keys() {
                match rec.instance_classes.get(id) {
                    Some(c) => vis.add(*c, 1),
                    None => flag(ViolationKind::Counts, format!("instance id {id} is not in the record")),
                }
            }
            if vis != rec.visible_counts {
                flag(
                    ViolationKind::Counts,
                    format!("visible instances {vis:?} differ from the record {:?}", rec.visible_counts),
                );
            }
        }
        let mut placed = ClassCounts::default();
        for c in rec.instance_classes.values() {
            placed.add(*c, 1);
        }
        if placed != rec.plant_counts {
            flag(
                ViolationKind::Counts,
                format!("plant counts {:?} differ from the instance table {placed:?}", rec.plant_counts),
            );
        }
        if rec.plant_counts.crop + rec.dormant_count != rec.layout.rows * rec.layout.plants_per_row {
            flag(
                ViolationKind::Counts,
                format!(
                    "{} crops + {} dormant != {} slots",
                    rec.plant_counts.crop,
                    rec.dormant_count,
                    rec.layout.rows * rec.layout.plants_per_row
                ),
            );
        }
        let species_total: usize = rec.weed_species.values().sum();
        if species_total != rec.plant_counts.weeds() || rec.plant_counts.weeds() != rec.layout.weed_count {
            flag(
                ViolationKind::Counts,
                format!(
                    "weed counts disagree: species {species_total}, classes {}, layout {}",
                    rec.plant_counts.weeds(),
                    rec.layout.weed_count
                ),
            );
        }
        let (lo, hi) = WEED_COUNT_ENVELOPE;
        if !manifest.out_of_envelope && !(lo as usize..=hi as usize).contains(&rec.layout.weed_count) {
            flag(ViolationKind::Envelope, format!("weed count {} outside [{lo}, {hi}]", rec.layout.weed_count));
        }
    }
    // Every emitted file must be referenced.
    if let Ok(rd) = std::fs::read_dir(root) {
        let mut dirs: Vec<PathBuf> = rd
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir() && p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("scene_")))
            .collect();
        dirs.sort();
        for d in dirs {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&d)
                .map_err(|e| DatasetError::Io(format!("{}: {e}", d.display())))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .collect();
            files.sort();
            for f in files {
                if !referenced.contains(&f) {
                    report.violations.push(Violation {
                        scene: d.file_name().map(|n| n.to_string_lossy().into_owned()),
                        kind: ViolationKind::Unreferenced,
                        message: format!("{} is not in the manifest", f.display()),
                    });
                }
            }
        }
    }
    Ok(report)
}
