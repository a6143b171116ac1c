use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{DatasetError, GeneratorConfig};
use crate::field::FieldLayout;
use crate::plants::{SemanticClass, Species};
use crate::render::{CameraSpec, Channel};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub crop: usize,
    pub broadleaf_weed: usize,
    pub grassy_weed: usize,
}

impl ClassCounts {
    pub fn add(&mut self, class: SemanticClass, n: usize) {
        match class {
            SemanticClass::Crop => self.crop += n,
            SemanticClass::BroadleafWeed => self.broadleaf_weed += n,
            SemanticClass::GrassyWeed => self.grassy_weed += n,
        }
    }

    pub fn get(&self, class: SemanticClass) -> usize {
        match class {
            SemanticClass::Crop => self.crop,
            SemanticClass::BroadleafWeed => self.broadleaf_weed,
            SemanticClass::GrassyWeed => self.grassy_weed,
        }
    }

    pub fn weeds(&self) -> usize {
        self.broadleaf_weed + self.grassy_weed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SunRecord {
    pub latitude: f64,
    pub longitude: f64,
    pub time: DateTime<Utc>,
    pub azimuth: f64,
    pub elevation: f64,
    pub irradiance: f64,
    pub ambient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub id: String,
    pub index: usize,
    pub seed: u64,
    pub camera: CameraSpec,
    pub sun: SunRecord,
    pub layout: FieldLayout,
    /// Plants placed in the field, per class.
    pub plant_counts: ClassCounts,
    /// Crop slots left empty by dormancy.
    pub dormant_count: usize,
    pub weed_species: BTreeMap<Species, usize>,
    pub debris_count: usize,
    pub debris_density: f64,
    pub soil_preset: String,
    pub tire_track: bool,
    /// Class of every instance id.
    pub instance_classes: BTreeMap<u16, SemanticClass>,
    /// Instances with at least one visible pixel, per class.
    pub visible_counts: ClassCounts,
    /// Visible pixels per class.
    pub pixel_counts: ClassCounts,
    /// Channel files relative to the manifest directory.
    pub files: BTreeMap<Channel, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub generator: String,
    /// Set when layout ranges outside the agronomic envelopes were allowed.
    pub out_of_envelope: bool,
    pub config: GeneratorConfig,
    pub scenes: Vec<SceneRecord>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| DatasetError::Parse(format!("{}: {e}", path.display())))
    }

    /// Writes through a temporary file so readers never see a partial manifest.
    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        let tmp = path.with_extension("json.tmp");
        let io = |e: std::io::Error| DatasetError::Io(format!("{}: {e}", path.display()));
        std::fs::write(&tmp, text + "\n").map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }

    /// Fraction of crop slots left empty over all scenes.
    pub fn pooled_dormancy(&self) -> f64 {
        let slots: usize = self.scenes.iter().map(|s| s.layout.rows * s.layout.plants_per_row).sum();
        let dormant: usize = self.scenes.iter().map(|s| s.dormant_count).sum();
        dormant as f64 / slots.max(1) as f64
    }
}
