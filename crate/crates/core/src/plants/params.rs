use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{PlantError, Species};
use crate::geom::Tessellation;
use crate::lsys::FunctionCurve;

pub(crate) const GRASSY_GRAMMAR: &str = include_str!("../../grammars/grassy_weed.lsys");
pub(crate) const BROADLEAF_GRAMMAR: &str = include_str!("../../grammars/broadleaf_weed.lsys");

fn curve(points: &[(f64, f64)]) -> FunctionCurve {
    FunctionCurve::new(points).expect("built-in curve knots are valid")
}

/// Morphology and timing of the soybean model. Ages are days after
/// planting; lengths are metres; angles are degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoybeanParams {
    pub emergence_day: f64,
    pub end_day: f64,
    pub height_cap: f64,
    pub hypocotyl_length: f64,
    /// Age at which the hypocotyl starts elongating (before emergence).
    pub hypocotyl_start: f64,
    pub epicotyl_length: f64,
    pub internode_length: f64,
    /// Fraction of final internode length against internode age.
    pub elongation: FunctionCurve,
    /// Range of the per-plant size multiplier.
    pub vigour: (f64, f64),
    pub unifoliate_emergence: f64,
    pub unifoliate_open_days: f64,
    pub first_trifoliate: f64,
    pub trifoliate_interval: f64,
    pub trifoliate_open_days: f64,
    pub max_trifoliates: usize,
    /// Half width of the uniform shift applied to the whole organ schedule.
    pub timing_jitter: f64,
    /// Leaf size fraction against leaf age in units of its opening time.
    pub expansion: FunctionCurve,
    /// Leaf size multiplier against relative node height.
    pub position_size: FunctionCurve,
    /// Elevation of opened leaves above horizontal against relative node height.
    pub inclination: FunctionCurve,
    pub cotyledon_length: f64,
    pub cotyledon_width: f64,
    pub unifoliate_length: f64,
    pub unifoliate_width: f64,
    pub unifoliate_petiole: f64,
    pub leaflet_length: f64,
    pub leaflet_width: f64,
    pub petiole_length: f64,
    pub lateral_leaflet_angle: f64,
    pub lateral_leaflet_scale: f64,
    pub size_jitter: f64,
    pub droop: f64,
    pub droop_jitter: f64,
    pub azimuth_jitter: f64,
    pub leaf_cup: f64,
    pub stem_radius: f64,
    pub stem_lean: f64,
    pub petiole_radius: f64,
    pub petiole_section_points: usize,
    pub tessellation: Tessellation,
}

impl Default for SoybeanParams {
    fn default() -> Self {
        Self {
            emergence_day: 5.0,
            end_day: 35.0,
            height_cap: 0.36,
            hypocotyl_length: 0.04,
            hypocotyl_start: 3.0,
            epicotyl_length: 0.035,
            internode_length: 0.05,
            elongation: curve(&[(0.0, 0.05), (2.0, 0.3), (5.0, 0.75), (8.0, 1.0)]),
            vigour: (0.92, 1.03),
            unifoliate_emergence: 7.0,
            unifoliate_open_days: 3.0,
            first_trifoliate: 10.0,
            trifoliate_interval: 4.5,
            trifoliate_open_days: 4.0,
            max_trifoliates: 6,
            timing_jitter: 0.5,
            expansion: curve(&[(0.0, 0.12), (1.0, 0.85), (2.0, 1.0)]),
            position_size: curve(&[(0.0, 0.85), (0.6, 1.0), (1.0, 0.9)]),
            inclination: curve(&[(0.0, 10.0), (0.5, 22.0), (1.0, 40.0)]),
            cotyledon_length: 0.02,
            cotyledon_width: 0.012,
            unifoliate_length: 0.06,
            unifoliate_width: 0.045,
            unifoliate_petiole: 0.025,
            leaflet_length: 0.07,
            leaflet_width: 0.045,
            petiole_length: 0.06,
            lateral_leaflet_angle: 65.0,
            lateral_leaflet_scale: 0.85,
            size_jitter: 0.1,
            droop: 25.0,
            droop_jitter: 10.0,
            azimuth_jitter: 15.0,
            leaf_cup: 0.12,
            stem_radius: 0.0018,
            stem_lean: 6.0,
            petiole_radius: 0.0008,
            petiole_section_points: 6,
            tessellation: Tessellation::default(),
        }
    }
}

/// Leaf geometry shared by the grammar-driven species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafShape {
    /// Edge rise of the blade section, in half widths.
    pub cup: f64,
    /// Program curve giving the section profile; overrides `cup`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_curve: Option<String>,
    /// Twist rate along the blade, degrees per unit length fraction.
    pub twist_rate: f64,
    /// Midrib droop at the tip when the grammar does not pass one.
    pub droop: f64,
    /// Length fraction over which a closed sheath opens into the blade.
    pub sheath_fraction: f64,
    /// Sheath half width relative to the blade half width.
    pub sheath_width: f64,
}

/// Parameters of a species defined by an `.lsys` grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsysSpeciesParams {
    pub grammar_file: String,
    #[serde(skip)]
    pub grammar: String,
    /// Overrides of grammar constants.
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    /// Overrides of grammar curves.
    #[serde(default)]
    pub curves: BTreeMap<String, FunctionCurve>,
    pub max_steps: usize,
    /// Stem diameter, m.
    pub stem_width: f64,
    pub stem_section_points: usize,
    pub tessellation: Tessellation,
    pub leaf: LeafShape,
}

impl LsysSpeciesParams {
    pub fn grassy_default() -> Self {
        Self {
            grammar_file: "grassy_weed.lsys".into(),
            grammar: GRASSY_GRAMMAR.into(),
            constants: BTreeMap::new(),
            curves: BTreeMap::new(),
            max_steps: 64,
            stem_width: 0.003,
            stem_section_points: 8,
            tessellation: Tessellation::default(),
            leaf: LeafShape {
                cup: 0.25,
                section_curve: None,
                twist_rate: 40.0,
                droop: 60.0,
                sheath_fraction: 0.15,
                sheath_width: 0.55,
            },
        }
    }

    pub fn broadleaf_default() -> Self {
        Self {
            grammar_file: "broadleaf_weed.lsys".into(),
            grammar: BROADLEAF_GRAMMAR.into(),
            constants: BTreeMap::new(),
            curves: BTreeMap::new(),
            max_steps: 64,
            stem_width: 0.0025,
            stem_section_points: 8,
            tessellation: Tessellation::default(),
            leaf: LeafShape {
                cup: 0.1,
                section_curve: Some("leaf_section".into()),
                twist_rate: 0.0,
                droop: 30.0,
                sheath_fraction: 0.0,
                sheath_width: 1.0,
            },
        }
    }

    /// Parses the grammar and applies constant and curve overrides.
    pub fn program(&self) -> Result<crate::lsys::LSystemProgram, PlantError> {
        let mut program = crate::lsys::parse_lsystem(&self.grammar)?;
        for (k, v) in &self.constants {
            program.set_constant(k, *v)?;
        }
        for (k, c) in &self.curves {
            program.set_curve(k, c.clone());
        }
        Ok(program)
    }
}

/// Parameters of all species.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantParams {
    pub soybean: SoybeanParams,
    pub grassy_weed: LsysSpeciesParams,
    pub broadleaf_weed: LsysSpeciesParams,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            soybean: SoybeanParams::default(),
            grassy_weed: LsysSpeciesParams::grassy_default(),
            broadleaf_weed: LsysSpeciesParams::broadleaf_default(),
        }
    }
}

impl PlantParams {
    /// Reads `<species>.toml` files from `dir`, each overriding the defaults
    /// key by key. Grammar files named by `grammar_file` are read from the
    /// same directory when present.
    pub fn load_dir(dir: &Path) -> Result<Self, PlantError> {
        let mut out = Self::default();
        for sp in Species::ALL {
            let path = dir.join(format!("{}.toml", sp.name()));
            if !path.exists() {
                continue;
            }
            let text = read(&path)?;
            match sp {
                Species::Soybean => out.soybean = overlay(&out.soybean, &text, sp)?,
                Species::GrassyWeed => out.grassy_weed = overlay_lsys(&out.grassy_weed, &text, dir, sp)?,
                Species::BroadleafWeed => out.broadleaf_weed = overlay_lsys(&out.broadleaf_weed, &text, dir, sp)?,
            }
        }
        Ok(out)
    }

    pub fn species_toml(&self, species: Species) -> String {
        let text = match species {
            Species::Soybean => toml::to_string(&self.soybean),
            Species::GrassyWeed => toml::to_string(&self.grassy_weed),
            Species::BroadleafWeed => toml::to_string(&self.broadleaf_weed),
        };
        text.expect("parameters serialise to TOML")
    }
}

fn read(path: &Path) -> Result<String, PlantError> {
    std::fs::read_to_string(path).map_err(|source| PlantError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn overlay_lsys(base: &LsysSpeciesParams, text: &str, dir: &Path, sp: Species) -> Result<LsysSpeciesParams, PlantError> {
    let mut p: LsysSpeciesParams = overlay(base, text, sp)?;
    let grammar = dir.join(&p.grammar_file);
    p.grammar = if grammar.exists() {
        read(&grammar)?
    } else if p.grammar_file == base.grammar_file {
        base.grammar.clone()
    } else {
        return Err(PlantError::Params {
            key: format!("{sp}.grammar_file"),
            message: format!("{} not found", grammar.display()),
        });
    };
    Ok(p)
}

/// Deserialises `text` on top of the serialised `base`.
pub(crate) fn overlay<T: Serialize + DeserializeOwned>(base: &T, text: &str, sp: Species) -> Result<T, PlantError> {
    let err = |message: String| PlantError::Params {
        key: sp.name().into(),
        message,
    };
    let mut table = toml::Table::try_from(base).map_err(|e| err(e.to_string()))?;
    let patch: toml::Table = toml::from_str(text).map_err(|e| err(e.to_string()))?;
    merge(&mut table, patch);
    table.try_into().map_err(|e: toml::de::Error| err(e.to_string()))
}

pub(crate) fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (k, v) in patch {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(p)) => merge(b, p),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
