use super::turtle_mesh::{build, derive_to_fixpoint};
use super::{LsysSpeciesParams, PlantAssembly, PlantError, Species};
use crate::seed::substream;

/// Grows a grassy weed of `age` days from its distichous grammar.
///
/// The grammar reads the plant age from the constant `age` and must declare
/// `emergence`.
pub fn grow_grassy_weed(age: f64, seed: u64, params: &LsysSpeciesParams) -> Result<PlantAssembly, PlantError> {
    grow_lsys(Species::GrassyWeed, age, seed, params)
}

pub(crate) fn grow_lsys(
    species: Species,
    age: f64,
    seed: u64,
    params: &LsysSpeciesParams,
) -> Result<PlantAssembly, PlantError> {
    let mut program = params.program()?;
    let emergence = program.constant("emergence").ok_or_else(|| PlantError::Params {
        key: format!("{species}.constants.emergence"),
        message: "the grammar must declare `emergence`".into(),
    })?;
    if !(age >= emergence && age.is_finite()) {
        return Err(PlantError::AgeOutOfWindow {
            species,
            age,
            min: emergence,
            max: f64::INFINITY,
        });
    }
    program.set_constant("age", age)?;
    let mut rng = substream(seed, species.name());
    let ms = derive_to_fixpoint(&program, params.max_steps, &mut rng)?;
    build(species, age, seed, &program, &ms, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_leaf_at_emergence() {
        let p = LsysSpeciesParams::grassy_default();
        let e = p.program().unwrap().constant("emergence").unwrap();
        let a = grow_grassy_weed(e, 4, &p).unwrap();
        assert_eq!(a.leaves.len(), 1);
        assert!(matches!(grow_grassy_weed(e - 0.5, 4, &p), Err(PlantError::AgeOutOfWindow { .. })));
    }
}
