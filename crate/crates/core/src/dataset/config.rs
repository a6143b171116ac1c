use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::field::{FieldConfig, LibraryConfig};
use crate::render::{CameraConfig, Channel};

/// Ranges the sun is drawn from. Times are local solar hours, converted to
/// UTC from the sampled longitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SunConfig {
    pub latitude: (f64, f64),
    pub longitude: (f64, f64),
    /// First and last date, `YYYY-MM-DD`.
    pub dates: (String, String),
    pub solar_hour: (f64, f64),
    /// Draws with a lower sun are rejected, degrees.
    pub min_elevation: f64,
    pub irradiance: (f64, f64),
    pub ambient: (f64, f64),
}

impl Default for SunConfig {
    fn default() -> Self {
        Self {
            latitude: (36.0, 44.0),
            longitude: (-97.0, -82.0),
            dates: ("2024-05-20".into(), "2024-07-31".into()),
            solar_hour: (9.0, 16.0),
            min_elevation: 15.0,
            irradiance: (0.8, 1.1),
            ambient: (0.25, 0.45),
        }
    }
}

impl SunConfig {
    pub fn date_range(&self) -> Result<(NaiveDate, NaiveDate), DatasetError> {
        let parse = |s: &str| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| DatasetError::Config {
                key: "sun.dates".into(),
                message: format!("`{s}`: {e}"),
            })
        };
        let (a, b) = (parse(&self.dates.0)?, parse(&self.dates.1)?);
        if a > b {
            return Err(DatasetError::Config {
                key: "sun.dates".into(),
                message: "first date is after the last".into(),
            });
        }
        Ok((a, b))
    }
}

/// Where external assets come from; procedural stand-ins are used for any
/// directory left unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssetConfig {
    /// Directory of `<species>.toml` plant parameter overrides.
    pub plant_params: Option<PathBuf>,
    /// Directory holding one `<species>/atlas.toml` atlas per species.
    pub atlases: Option<PathBuf>,
    /// Soil texture directory with a `soil.toml` descriptor.
    pub soil: Option<PathBuf>,
    pub soil_texture_px: u32,
    pub soil_variants: usize,
    pub atlas_cell_px: u32,
}

impl Default for AssetConfig {
    fn default() -> Self {
        Self {
            plant_params: None,
            atlases: None,
            soil: None,
            soil_texture_px: 128,
            soil_variants: 3,
            atlas_cell_px: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub count: usize,
    pub out: PathBuf,
    pub channels: Vec<Channel>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    /// Accept layout ranges outside the agronomic envelopes.
    pub allow_out_of_envelope: bool,
    pub field: FieldConfig,
    pub library: LibraryConfig,
    pub camera: CameraConfig,
    pub sun: SunConfig,
    pub assets: AssetConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 8,
            out: PathBuf::from("out"),
            channels: Channel::ALL.to_vec(),
            jobs: 0,
            allow_out_of_envelope: false,
            field: FieldConfig::default(),
            library: LibraryConfig::default(),
            camera: CameraConfig::default(),
            sun: SunConfig::default(),
            assets: AssetConfig::default(),
        }
    }
}

fn range_ok(key: &str, r: (f64, f64)) -> Result<(), DatasetError> {
    if r.0.is_finite() && r.1.is_finite() && r.0 <= r.1 {
        Ok(())
    } else {
        Err(DatasetError::Config {
            key: key.into(),
            message: format!("expected finite lo <= hi, got ({}, {})", r.0, r.1),
        })
    }
}

impl GeneratorConfig {
    /// Parses TOML text; unset keys take their defaults.
    pub fn from_toml(text: &str) -> Result<Self, DatasetError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| DatasetError::Parse(e.to_string()))?;
        cfg.field.layout.allow_out_of_envelope |= cfg.allow_out_of_envelope;
        cfg.allow_out_of_envelope = cfg.field.layout.allow_out_of_envelope;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.count < 1 {
            return Err(DatasetError::Config {
                key: "count".into(),
                message: "must be at least 1".into(),
            });
        }
        if self.channels.is_empty() {
            return Err(DatasetError::Config {
                key: "channels".into(),
                message: "select at least one channel".into(),
            });
        }
        let mut layout = self.field.layout.clone();
        layout.allow_out_of_envelope |= self.allow_out_of_envelope;
        FieldConfig {
            layout,
            ..self.field.clone()
        }
        .validate()?;
        self.camera.validate()?;
        if self.library.size < 1 {
            return Err(DatasetError::Config {
                key: "library.size".into(),
                message: "must be at least 1".into(),
            });
        }
        range_ok("library.soybean_age", self.library.soybean_age)?;
        range_ok("library.grassy_weed_age", self.library.grassy_weed_age)?;
        range_ok("library.broadleaf_weed_age", self.library.broadleaf_weed_age)?;
        let s = &self.sun;
        range_ok("sun.latitude", s.latitude)?;
        range_ok("sun.longitude", s.longitude)?;
        range_ok("sun.solar_hour", s.solar_hour)?;
        range_ok("sun.irradiance", s.irradiance)?;
        range_ok("sun.ambient", s.ambient)?;
        if s.latitude.0 < -90.0 || s.latitude.1 > 90.0 || s.longitude.0 < -180.0 || s.longitude.1 > 180.0 {
            return Err(DatasetError::Config {
                key: "sun.latitude".into(),
                message: "latitude must lie in [-90, 90] and longitude in [-180, 180]".into(),
            });
        }
        if s.solar_hour.0 < 0.0 || s.solar_hour.1 > 24.0 {
            return Err(DatasetError::Config {
                key: "sun.solar_hour".into(),
                message: "must lie in [0, 24]".into(),
            });
        }
        if !(0.0..90.0).contains(&s.min_elevation) {
            return Err(DatasetError::Config {
                key: "sun.min_elevation".into(),
                message: "must lie in [0, 90)".into(),
            });
        }
        s.date_range()?;
        if self.assets.soil_texture_px < 4 || self.assets.atlas_cell_px < 4 {
            return Err(DatasetError::Config {
                key: "assets".into(),
                message: "texture sizes must be at least 4 px".into(),
            });
        }
        if self.assets.soil.is_none() && self.assets.soil_variants < 2 {
            return Err(DatasetError::Config {
                key: "assets.soil_variants".into(),
                message: "at least 2 variants per soil preset are needed".into(),
            });
        }
        Ok(())
    }

    /// Field configuration with the envelope override applied.
    pub fn effective_field(&self) -> FieldConfig {
        let mut f = self.field.clone();
        f.layout.allow_out_of_envelope |= self.allow_out_of_envelope;
        f
    }
}

/// Reads and validates a TOML configuration file.
pub fn load_config(path: &Path) -> Result<GeneratorConfig, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    GeneratorConfig::from_toml(&text)
}
