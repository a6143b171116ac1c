//! Parse a small parametric grammar, derive it and interpret the result.
//!
//! cargo run --example derive_lsystem

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soyfield::lsys::{derive, interpret, parse_lsystem, Primitive, TurtleConfig};

const GRAMMAR: &str = r#"
constants:
  angle = 25
  shrink = 0.7

axiom: A(1)

productions:
  A(s) : s > 0.2 -> F(s) [ +(angle) A(s * shrink) ] [ -(angle) A(s * shrink) ] L(s * 0.3, s * 0.1)
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let program = parse_lsystem(GRAMMAR)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 0..6 {
        let s = derive(&program, n, &mut rng)?;
        println!("step {n}: {} modules, {} F", s.len(), s.count('F'));
    }
    let s = derive(&program, 5, &mut rng)?;
    let cfg = TurtleConfig {
        step: 0.1,
        ..TurtleConfig::default()
    }
    .with_inert(program.inert_symbols());
    let prims = interpret(&s, &cfg)?;
    let segs = prims.iter().filter(|p| matches!(p, Primitive::Segment(_))).count();
    let top = prims
        .iter()
        .filter_map(|p| match p {
            Primitive::Segment(s) => Some(s.end.z),
            Primitive::Leaf(_) => None,
        })
        .fold(0.0, f64::max);
    println!("{segs} segments, {} leaves, top at {top:.3}", prims.len() - segs);

    // Fibonacci lengths from A -> AB, B -> A.
    let fib = parse_lsystem("axiom: A\nproductions:\n  A -> A B\n  B -> A\n")?;
    let lens: Vec<usize> = (0..10).map(|n| derive(&fib, n, &mut rng).map(|s| s.len())).collect::<Result<_, _>>()?;
    println!("fibonacci: {lens:?}");
    Ok(())
}
