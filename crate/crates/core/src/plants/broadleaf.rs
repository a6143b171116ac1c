use super::grassy::grow_lsys;
use super::{LsysSpeciesParams, PlantAssembly, PlantError, Species};

/// Grows a broadleaf weed of `age` days. Lateral branches start in the axils
/// of new leaves and extend as `vigour(age - birth) * branch_max`.
pub fn grow_broadleaf_weed(age: f64, seed: u64, params: &LsysSpeciesParams) -> Result<PlantAssembly, PlantError> {
    grow_lsys(Species::BroadleafWeed, age, seed, params)
}
