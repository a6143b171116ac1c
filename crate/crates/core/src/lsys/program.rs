use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::expr::{fmt_number, Expr};
use super::{FunctionCurve, LsysError};

/// Symbols with geometric meaning to the turtle.
pub const TURTLE_SYMBOLS: &[char] = &[
    'F', 'f', '+', '-', '&', '^', '/', '\\', '|', '[', ']', '!', 'L', 'K',
];

pub fn is_turtle_symbol(c: char) -> bool {
    TURTLE_SYMBOLS.contains(&c)
}

/// One module of a derived string: a symbol with numeric arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct Module {
    pub symbol: char,
    pub args: Vec<f64>,
}

impl Module {
    pub fn new(symbol: char, args: impl Into<Vec<f64>>) -> Self {
        Self {
            symbol,
            args: args.into(),
        }
    }

    pub fn bare(symbol: char) -> Self {
        Self {
            symbol,
            args: Vec::new(),
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                fmt_number(*a, f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The derivation state: an ordered sequence of modules.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModuleString(pub Vec<Module>);

impl ModuleString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Module> {
        self.0.iter()
    }

    pub fn count(&self, symbol: char) -> usize {
        self.0.iter().filter(|m| m.symbol == symbol).count()
    }

    /// True when every `]` closes an earlier `[` and nothing is left open.
    pub fn is_balanced(&self) -> bool {
        let mut depth = 0i64;
        for m in &self.0 {
            match m.symbol {
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        depth == 0
    }

    /// Parses a literal module string such as `F(1) [+(90) F(0.5)] A(2,3)`.
    pub fn parse(text: &str) -> Result<Self, LsysError> {
        super::parse::parse_module_string(text)
    }
}

impl fmt::Display for ModuleString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromIterator<Module> for ModuleString {
    fn from_iter<T: IntoIterator<Item = Module>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// A module in a successor or axiom whose arguments are still expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleTemplate {
    pub symbol: char,
    pub args: Vec<Expr>,
}

impl fmt::Display for ModuleTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub predecessor: char,
    pub formals: Vec<String>,
    pub guard: Option<Expr>,
    pub successor: Vec<ModuleTemplate>,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predecessor)?;
        if !self.formals.is_empty() {
            write!(f, "({})", self.formals.join(","))?;
        }
        if let Some(g) = &self.guard {
            write!(f, " : {g}")?;
        }
        f.write_str(" ->")?;
        for m in &self.successor {
            write!(f, " {m}")?;
        }
        Ok(())
    }
}

/// A parsed and validated parametric L-system.
#[derive(Debug, Clone, PartialEq)]
pub struct LSystemProgram {
    pub constants: BTreeMap<String, f64>,
    pub curves: BTreeMap<String, FunctionCurve>,
    /// Declared symbols without productions or turtle meaning.
    pub terminals: BTreeSet<char>,
    pub axiom: Vec<ModuleTemplate>,
    pub productions: Vec<Production>,
}

impl LSystemProgram {
    /// Replaces the value of a declared constant.
    pub fn set_constant(&mut self, name: &str, value: f64) -> Result<(), LsysError> {
        match self.constants.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(LsysError::UnknownConstant(name.to_string())),
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub fn curve(&self, name: &str) -> Option<&FunctionCurve> {
        self.curves.get(name)
    }

    /// Replaces a named curve (or adds one).
    pub fn set_curve(&mut self, name: &str, curve: FunctionCurve) {
        self.curves.insert(name.to_string(), curve);
    }

    /// Symbols the turtle should skip: everything the program declares
    /// that is not itself a turtle command.
    pub fn inert_symbols(&self) -> BTreeSet<char> {
        let mut set: BTreeSet<char> = self.terminals.clone();
        set.extend(self.productions.iter().map(|p| p.predecessor));
        set.extend(self.axiom.iter().map(|m| m.symbol));
        set.retain(|c| !is_turtle_symbol(*c));
        set
    }
}

impl fmt::Display for LSystemProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.constants.is_empty() {
            writeln!(f, "constants:")?;
            for (k, v) in &self.constants {
                write!(f, "  {k} = ")?;
                fmt_number(*v, f)?;
                writeln!(f)?;
            }
        }
        if !self.curves.is_empty() {
            writeln!(f, "curves:")?;
            for (k, c) in &self.curves {
                write!(f, "  {k}:")?;
                for (x, y) in c.points() {
                    f.write_str(" (")?;
                    fmt_number(x, f)?;
                    f.write_str(", ")?;
                    fmt_number(y, f)?;
                    f.write_str(")")?;
                }
                writeln!(f)?;
            }
        }
        if !self.terminals.is_empty() {
            write!(f, "terminals:")?;
            for t in &self.terminals {
                write!(f, " {t}")?;
            }
            writeln!(f)?;
        }
        write!(f, "axiom:")?;
        for m in &self.axiom {
            write!(f, " {m}")?;
        }
        writeln!(f)?;
        writeln!(f, "productions:")?;
        for p in &self.productions {
            writeln!(f, "  {p}")?;
        }
        Ok(())
    }
}
