use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::plants::{assign_leaf_textures, grow, MaterialRanges, PlantAssembly, PlantError, PlantParams, Species, TextureAtlas};
use crate::seed::{sub_seed, substream};

/// How the plant library is drawn: `size` plants per species with ages
/// uniform in the species' range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LibraryConfig {
    pub size: usize,
    pub soybean_age: (f64, f64),
    pub grassy_weed_age: (f64, f64),
    pub broadleaf_weed_age: (f64, f64),
    pub materials: MaterialRanges,
}

impl Default for LibraryConfig {
    fn default() -> Self {
        Self {
            size: 64,
            soybean_age: (5.0, 35.0),
            grassy_weed_age: (2.0, 30.0),
            broadleaf_weed_age: (2.0, 30.0),
            materials: MaterialRanges::default(),
        }
    }
}

impl LibraryConfig {
    pub fn age_range(&self, species: Species) -> (f64, f64) {
        match species {
            Species::Soybean => self.soybean_age,
            Species::GrassyWeed => self.grassy_weed_age,
            Species::BroadleafWeed => self.broadleaf_weed_age,
        }
    }
}

/// Immutable set of textured plants shared by all scenes of a run.
#[derive(Debug, Clone)]
pub struct PlantLibrary {
    pub plants: BTreeMap<Species, Vec<PlantAssembly>>,
    pub atlases: BTreeMap<Species, TextureAtlas>,
}

impl PlantLibrary {
    /// Grows and textures `cfg.size` plants per species. Each entry depends
    /// only on `(seed, species, index)`, so the result does not depend on
    /// the worker count.
    pub fn generate(
        params: &PlantParams,
        atlases: BTreeMap<Species, TextureAtlas>,
        cfg: &LibraryConfig,
        seed: u64,
    ) -> Result<Self, PlantError> {
        let mut plants = BTreeMap::new();
        for sp in Species::ALL {
            let atlas = atlases.get(&sp).ok_or_else(|| PlantError::Atlas(format!("no atlas for {sp}")))?;
            let (lo, hi) = cfg.age_range(sp);
            let list = (0..cfg.size)
                .into_par_iter()
                .map(|i| {
                    let s = sub_seed(seed, &format!("{sp}/{i}"));
                    let mut rng = substream(s, "library");
                    let age = if hi > lo { rng.random_range(lo..=hi) } else { lo };
                    let plant = grow(sp, age, s, params)?;
                    assign_leaf_textures(&plant, atlas, &mut substream(s, "textures"), &cfg.materials)
                })
                .collect::<Result<Vec<_>, _>>()?;
            plants.insert(sp, list);
        }
        Ok(Self { plants, atlases })
    }

    /// Procedural atlases for every species.
    pub fn procedural_atlases(seed: u64) -> BTreeMap<Species, TextureAtlas> {
        Species::ALL
            .into_iter()
            .map(|sp| (sp, TextureAtlas::procedural(sp, sub_seed(seed, sp.name()), 2, 4, 64)))
            .collect()
    }

    pub fn get(&self, species: Species, index: usize) -> Option<&PlantAssembly> {
        self.plants.get(&species)?.get(index)
    }

    pub fn count(&self, species: Species) -> usize {
        self.plants.get(&species).map_or(0, Vec::len)
    }
}
