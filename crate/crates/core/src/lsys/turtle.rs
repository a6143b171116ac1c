//! 3D turtle interpretation of module strings.
//!
//! | symbol | meaning |
//! |--------|---------|
//! | `F(l)` | draw a segment of length `l` |
//! | `f(l)` | move without drawing |
//! | `+(a)` `-(a)` | turn left / right around the up axis |
//! | `&(a)` `^(a)` | pitch down / up around the left axis |
//! | `\(a)` `/(a)` | roll left / right around the heading |
//! | `\|` | turn around |
//! | `[` `]` | push / pop the turtle state |
//! | `!(w)` | set the segment width (diameter) |
//! | `L(len, width[, age])` | place a leaf |
//! | `K(len, width[, age])` | place a cotyledon |
//!
//! Angles are in degrees. Segments drawn inside a bracket are labelled as
//! branches; segments on the outermost level belong to the stem.

use std::collections::BTreeSet;

use glam::DVec3;
use serde::{Deserialize, Serialize};

use super::program::ModuleString;
use super::LsysError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrganLabel {
    Stem,
    Leaf,
    Branch,
    Cotyledon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurtleState {
    pub position: DVec3,
    pub heading: DVec3,
    pub left: DVec3,
    pub up: DVec3,
    pub width: f64,
    pub label: OrganLabel,
}

impl TurtleState {
    /// Rotates heading and left around the up axis.
    pub fn turn(&mut self, degrees: f64) {
        let (s, c) = degrees.to_radians().sin_cos();
        let h = self.heading * c + self.left * s;
        let l = self.left * c - self.heading * s;
        self.heading = h;
        self.left = l;
        self.orthonormalize();
    }

    /// Rotates heading and up around the left axis; positive pitches down.
    pub fn pitch(&mut self, degrees: f64) {
        let (s, c) = degrees.to_radians().sin_cos();
        let h = self.heading * c - self.up * s;
        let u = self.up * c + self.heading * s;
        self.heading = h;
        self.up = u;
        self.orthonormalize();
    }

    /// Rotates left and up around the heading.
    pub fn roll(&mut self, degrees: f64) {
        let (s, c) = degrees.to_radians().sin_cos();
        let l = self.left * c + self.up * s;
        let u = self.up * c - self.left * s;
        self.left = l;
        self.up = u;
        self.orthonormalize();
    }

    fn orthonormalize(&mut self) {
        self.heading = self.heading.normalize();
        self.left = (self.left - self.heading * self.left.dot(self.heading)).normalize();
        self.up = self.heading.cross(self.left);
    }
}

#[derive(Debug, Clone)]
pub struct TurtleConfig {
    pub origin: DVec3,
    pub heading: DVec3,
    pub left: DVec3,
    pub width: f64,
    pub step: f64,
    pub angle: f64,
    /// Symbols skipped without error (non-terminals of the grammar).
    pub inert: BTreeSet<char>,
}

impl Default for TurtleConfig {
    fn default() -> Self {
        Self {
            origin: DVec3::ZERO,
            heading: DVec3::Z,
            left: DVec3::X,
            width: 0.002,
            step: 1.0,
            angle: 90.0,
            inert: BTreeSet::new(),
        }
    }
}

impl TurtleConfig {
    pub fn with_inert(mut self, inert: BTreeSet<char>) -> Self {
        self.inert = inert;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: DVec3,
    pub end: DVec3,
    pub width: f64,
    pub label: OrganLabel,
    /// Bracket depth at which the segment was drawn.
    pub depth: usize,
    /// First segment drawn after a `[`: the origin of a branch.
    pub starts_branch: bool,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafPlacement {
    pub position: DVec3,
    pub heading: DVec3,
    pub left: DVec3,
    pub up: DVec3,
    pub length: f64,
    pub width: f64,
    pub age: f64,
    pub label: OrganLabel,
    pub depth: usize,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Segment(Segment),
    Leaf(LeafPlacement),
}

impl Primitive {
    pub fn label(&self) -> OrganLabel {
        match self {
            Primitive::Segment(s) => s.label,
            Primitive::Leaf(l) => l.label,
        }
    }
}

fn arg(args: &[f64], i: usize, default: f64) -> f64 {
    args.get(i).copied().unwrap_or(default)
}

/// Interprets a module string into organ primitives.
pub fn interpret(ms: &ModuleString, config: &TurtleConfig) -> Result<Vec<Primitive>, LsysError> {
    let heading = config.heading.normalize();
    let left = (config.left - heading * config.left.dot(heading)).normalize();
    let mut state = TurtleState {
        position: config.origin,
        heading,
        left,
        up: heading.cross(left),
        width: config.width,
        label: OrganLabel::Stem,
    };
    let mut stack: Vec<(TurtleState, bool)> = Vec::new();
    let mut fresh_branch = false;
    let mut out = Vec::new();

    for (index, m) in ms.iter().enumerate() {
        let a = &m.args;
        match m.symbol {
            'F' => {
                let len = arg(a, 0, config.step);
                let start = state.position;
                state.position += state.heading * len;
                out.push(Primitive::Segment(Segment {
                    start,
                    end: state.position,
                    width: state.width,
                    label: state.label,
                    depth: stack.len(),
                    starts_branch: fresh_branch,
                    params: a.clone(),
                }));
                fresh_branch = false;
            }
            'f' => state.position += state.heading * arg(a, 0, config.step),
            '+' => state.turn(arg(a, 0, config.angle)),
            '-' => state.turn(-arg(a, 0, config.angle)),
            '&' => state.pitch(arg(a, 0, config.angle)),
            '^' => state.pitch(-arg(a, 0, config.angle)),
            '\\' => state.roll(arg(a, 0, config.angle)),
            '/' => state.roll(-arg(a, 0, config.angle)),
            '|' => state.turn(180.0),
            '!' => state.width = arg(a, 0, config.width),
            '[' => {
                stack.push((state.clone(), fresh_branch));
                state.label = OrganLabel::Branch;
                fresh_branch = true;
            }
            ']' => {
                let (restored, flag) = stack.pop().ok_or(LsysError::UnbalancedBrackets { index })?;
                state = restored;
                fresh_branch = flag;
            }
            'L' | 'K' => out.push(Primitive::Leaf(LeafPlacement {
                position: state.position,
                heading: state.heading,
                left: state.left,
                up: state.up,
                length: arg(a, 0, config.step),
                width: arg(a, 1, arg(a, 0, config.step) * 0.4),
                age: arg(a, 2, 0.0),
                label: if m.symbol == 'L' {
                    OrganLabel::Leaf
                } else {
                    OrganLabel::Cotyledon
                },
                depth: stack.len(),
                params: a.clone(),
            })),
            c if config.inert.contains(&c) => {}
            c => return Err(LsysError::UnknownCommand { symbol: c, index }),
        }
    }
    if !stack.is_empty() {
        return Err(LsysError::UnbalancedBrackets { index: ms.len() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn segs(p: &[Primitive]) -> Vec<&Segment> {
        p.iter()
            .filter_map(|p| match p {
                Primitive::Segment(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn empty_string_gives_nothing() {
        assert!(interpret(&ModuleString::new(), &TurtleConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn single_step_goes_up() {
        let ms = ModuleString::parse("F(1)").unwrap();
        let out = interpret(&ms, &TurtleConfig::default()).unwrap();
        let s = segs(&out);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].start, DVec3::ZERO);
        assert!((s[0].end - DVec3::Z).length() < 1e-12);
        assert_eq!(s[0].label, OrganLabel::Stem);
    }

    #[test]
    fn brackets_restore_state() {
        let ms = ModuleString::parse("[+(90) F(1)] F(1)").unwrap();
        let out = interpret(&ms, &TurtleConfig::default()).unwrap();
        let s = segs(&out);
        assert_eq!(s.len(), 2);
        // Turning left by 90 degrees from +Z with left = +X heads along +X.
        assert!((s[0].end - DVec3::X).length() < 1e-12);
        assert_eq!(s[0].label, OrganLabel::Branch);
        assert!(s[0].starts_branch);
        assert_eq!(s[1].start, DVec3::ZERO);
        assert!((s[1].end - DVec3::Z).length() < 1e-12);
        assert_eq!(s[1].label, OrganLabel::Stem);
    }

    #[test]
    fn errors() {
        let cfg = TurtleConfig::default();
        assert!(matches!(
            interpret(&ModuleString::parse("[F").unwrap(), &cfg),
            Err(LsysError::UnbalancedBrackets { .. })
        ));
        assert!(matches!(
            interpret(&ModuleString::parse("F]").unwrap(), &cfg),
            Err(LsysError::UnbalancedBrackets { index: 1 })
        ));
        assert!(matches!(
            interpret(&ModuleString::parse("F Q").unwrap(), &cfg),
            Err(LsysError::UnknownCommand { symbol: 'Q', index: 1 })
        ));
        let cfg = cfg.with_inert(['Q'].into_iter().collect());
        assert!(interpret(&ModuleString::parse("F Q").unwrap(), &cfg).is_ok());
    }

    #[test]
    fn leaf_carries_parameters() {
        let ms = ModuleString::parse("F(0.1) L(0.05, 0.02, 3)").unwrap();
        let out = interpret(&ms, &TurtleConfig::default()).unwrap();
        let Primitive::Leaf(l) = &out[1] else { panic!() };
        assert_eq!((l.length, l.width, l.age), (0.05, 0.02, 3.0));
        assert_eq!(l.label, OrganLabel::Leaf);
        assert!((l.position - DVec3::new(0.0, 0.0, 0.1)).length() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn frame_stays_orthonormal(ops in prop::collection::vec((0u8..3, -720.0f64..720.0), 10_000)) {
            let mut s = TurtleState {
                position: DVec3::ZERO,
                heading: DVec3::Z,
                left: DVec3::X,
                up: DVec3::Z.cross(DVec3::X),
                width: 0.0,
                label: OrganLabel::Stem,
            };
            for (kind, angle) in ops {
                match kind {
                    0 => s.turn(angle),
                    1 => s.pitch(angle),
                    _ => s.roll(angle),
                }
            }
            for v in [s.heading, s.left, s.up] {
                prop_assert!((v.length() - 1.0).abs() < 1e-6);
            }
            prop_assert!(s.heading.dot(s.left).abs() < 1e-6);
            prop_assert!(s.heading.dot(s.up).abs() < 1e-6);
            prop_assert!(s.left.dot(s.up).abs() < 1e-6);
        }
    }
}
