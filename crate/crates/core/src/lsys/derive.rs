use rand::Rng;

use super::expr::{EvalError, Scope};
use super::program::{LSystemProgram, Module, ModuleString, ModuleTemplate};
use super::LsysError;

/// Evaluates the axiom into a module string.
pub fn axiom_string<R: Rng + ?Sized>(program: &LSystemProgram, rng: &mut R) -> Result<ModuleString, LsysError> {
    let scope = Scope {
        formals: &[],
        values: &[],
        constants: &program.constants,
        curves: &program.curves,
    };
    let mut out = Vec::with_capacity(program.axiom.len());
    instantiate(&program.axiom, &scope, rng, &mut out).map_err(|source| LsysError::AxiomEval { source })?;
    Ok(ModuleString(out))
}

fn instantiate<R: Rng + ?Sized>(
    templates: &[ModuleTemplate],
    scope: &Scope<'_>,
    rng: &mut R,
    out: &mut Vec<Module>,
) -> Result<(), EvalError> {
    for t in templates {
        let mut args = Vec::with_capacity(t.args.len());
        for a in &t.args {
            args.push(a.eval(scope, rng)?);
        }
        out.push(Module { symbol: t.symbol, args });
    }
    Ok(())
}

/// Applies one parallel rewriting step to `current`.
///
/// Modules are visited left to right and the first production whose
/// predecessor matches and whose guard holds is applied. Random calls draw
/// from `rng` in that visiting order.
pub fn step<R: Rng + ?Sized>(
    program: &LSystemProgram,
    current: &ModuleString,
    rng: &mut R,
) -> Result<ModuleString, LsysError> {
    let mut next = Vec::with_capacity(current.len() * 2);
    for module in current.iter() {
        let mut rewritten = false;
        for (index, prod) in program.productions.iter().enumerate() {
            if prod.predecessor != module.symbol || prod.formals.len() != module.args.len() {
                continue;
            }
            let scope = Scope {
                formals: &prod.formals,
                values: &module.args,
                constants: &program.constants,
                curves: &program.curves,
            };
            let wrap = |source| LsysError::Eval {
                production: index,
                rule: prod.to_string(),
                source,
            };
            if let Some(guard) = &prod.guard {
                if guard.eval(&scope, rng).map_err(wrap)? == 0.0 {
                    continue;
                }
            }
            instantiate(&prod.successor, &scope, rng, &mut next).map_err(wrap)?;
            rewritten = true;
            break;
        }
        if !rewritten {
            next.push(module.clone());
        }
    }
    Ok(ModuleString(next))
}

/// Derives `steps` generations starting from the axiom.
pub fn derive<R: Rng + ?Sized>(program: &LSystemProgram, steps: usize, rng: &mut R) -> Result<ModuleString, LsysError> {
    let mut s = axiom_string(program, rng)?;
    for _ in 0..steps {
        s = step(program, &s, rng)?;
    }
    Ok(s)
}
