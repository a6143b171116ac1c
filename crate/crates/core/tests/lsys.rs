mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soyfield::lsys::{derive, interpret, parse_lsystem, LsysError, Primitive, TurtleConfig};

#[test]
fn fibonacci_lengths_match_brute_force() {
    let program = parse_lsystem("axiom: A\nproductions:\n  A -> A B\n  B -> A\n").unwrap();
    let rules = HashMap::from([('A', "AB"), ('B', "A")]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in 0..=15 {
        let got = derive(&program, n, &mut rng).unwrap();
        let want = common::rewrite("A", &rules, n);
        assert_eq!(got.len(), want.chars().count(), "step {n}");
        let symbols: String = got.iter().map(|m| m.symbol).collect();
        assert_eq!(symbols, want, "step {n}");
    }
}

#[test]
fn conditions_and_parameters() {
    let src = "axiom: A(0)\nproductions:\n  A(i) : i < 3 -> F(i + 1) A(i + 1)\n  A(i) : i >= 3 -> L(i, 2 * i)\n";
    let program = parse_lsystem(src).unwrap();
    let s = derive(&program, 10, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let lens: Vec<f64> = s.iter().filter(|m| m.symbol == 'F').map(|m| m.args[0]).collect();
    assert_eq!(lens, vec![1.0, 2.0, 3.0]);
    let leaf = s.iter().find(|m| m.symbol == 'L').unwrap();
    assert_eq!(leaf.args, vec![3.0, 6.0]);
}

#[test]
fn parse_errors_carry_positions() {
    match parse_lsystem("axiom: A\nproductions:\n  A -> A B(\n") {
        Err(LsysError::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    assert!(matches!(
        parse_lsystem("axiom: A(1)\nproductions:\n  A(x) -> F(y)\n"),
        Err(LsysError::UnknownIdentifier { .. })
    ));
}

#[test]
fn stochastic_derivation_is_seeded() {
    let src = "axiom: A\nproductions:\n  A -> F(rand(0, 1)) A\n";
    let p = parse_lsystem(src).unwrap();
    let a = derive(&p, 8, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = derive(&p, 8, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let c = derive(&p, 8, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn turtle_path_length_equals_total_step() {
    let p = parse_lsystem("axiom: F(1) [ +(30) F(2) ] &(45) F(0.5)\nproductions:\n").unwrap();
    let s = derive(&p, 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let prims = interpret(&s, &TurtleConfig::default()).unwrap();
    let total: f64 = prims
        .iter()
        .map(|p| match p {
            Primitive::Segment(s) => s.start.distance(s.end),
            Primitive::Leaf(_) => 0.0,
        })
        .sum();
    assert!((total - 3.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Bracketed rewriting keeps brackets balanced and every segment has
    /// unit length whatever the angle.
    #[test]
    fn branching_keeps_balance(angle in 1.0f64..170.0, steps in 0usize..5, seed in any::<u64>()) {
        let src = format!("axiom: X\nproductions:\n  X -> F [ +({angle}) X ] [ -({angle}) /(rand(0, 90)) X ] F X\n");
        let p = parse_lsystem(&src).unwrap();
        let s = derive(&p, steps, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(s.is_balanced());
        let prims = interpret(&s, &TurtleConfig::default().with_inert(p.inert_symbols())).unwrap();
        for pr in prims {
            if let Primitive::Segment(seg) = pr {
                prop_assert!((seg.start.distance(seg.end) - 1.0).abs() < 1e-9);
            }
        }
    }

    /// A -> AB, B -> A lengths follow the Fibonacci recurrence.
    #[test]
    fn fibonacci_recurrence(n in 2usize..18) {
        let p = parse_lsystem("axiom: A\nproductions:\n  A -> A B\n  B -> A\n").unwrap();
        let len = |k| derive(&p, k, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().len();
        prop_assert_eq!(len(n), len(n - 1) + len(n - 2));
    }
}
