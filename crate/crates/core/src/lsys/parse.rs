//! Hand-written recursive-descent parser for `.lsys` sources.
//!
//! ```text
//! # comment
//! constants:
//!   plastochron = 3.5
//! curves:
//!   leaf_size: (0, 0.2) (10, 1)
//! terminals: X
//! axiom: A(0)
//! productions:
//!   A(n) : n < 3 -> A(n+1) [ +(45) L(leaf_size(n), 0.01) ] X
//!   B -> A; C -> B
//! ```
//!
//! Module symbols are single characters; identifiers inside argument lists
//! and guards may be longer. Entries are separated by newlines or `;`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::expr::{builtin_arity, BinaryOp, Expr, UnaryOp};
use super::program::{is_turtle_symbol, LSystemProgram, Module, ModuleString, ModuleTemplate, Production};
use super::{FunctionCurve, LsysError};

const SECTIONS: &[&str] = &["constants", "curves", "terminals", "axiom", "productions"];

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

struct Cursor {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            idx: 0,
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.idx + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.idx >= self.chars.len()
    }

    /// Skips spaces, tabs and comments, but not newlines.
    fn skip_inline(&mut self) {
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' || c == '\r' {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Skips whitespace including newlines and `;` separators.
    fn skip_separators(&mut self) {
        loop {
            self.skip_inline();
            match self.peek() {
                Some('\n') | Some(';') => {
                    self.bump();
                }
                _ => break,
            }
        }
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> LsysError {
        LsysError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char, what: &str) -> Result<(), LsysError> {
        self.skip_inline();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(self.pos(), format!("expected {what}, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some('\n') => "end of line".to_string(),
            Some(c) => format!("`{c}`"),
        }
    }

    /// Returns the section keyword at the cursor when it is followed by `:`.
    fn peek_section(&self) -> Option<&'static str> {
        for name in SECTIONS {
            let len = name.chars().count();
            let matches = name.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c));
            if !matches {
                continue;
            }
            let mut k = len;
            while matches!(self.peek_at(k), Some(' ') | Some('\t')) {
                k += 1;
            }
            if self.peek_at(k) == Some(':') {
                return Some(name);
            }
        }
        None
    }

    fn consume_section(&mut self, name: &str) {
        for _ in 0..name.chars().count() {
            self.bump();
        }
        self.skip_inline();
        self.bump(); // ':'
    }

    fn ident(&mut self) -> Option<String> {
        let c = self.peek()?;
        if !(c.is_ascii_alphabetic() || c == '_') {
            return None;
        }
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Some(s)
    }

    fn number(&mut self) -> Result<f64, LsysError> {
        let start = self.pos();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                s.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E')
                && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit() || d == '-' || d == '+')
            {
                s.push(c);
                self.bump();
                if let Some(sign @ ('+' | '-')) = self.peek() {
                    s.push(sign);
                    self.bump();
                }
            } else {
                break;
            }
        }
        s.parse::<f64>()
            .map_err(|_| self.error(start, format!("malformed number `{s}`")))
    }

    fn signed_number(&mut self) -> Result<f64, LsysError> {
        self.skip_inline();
        let neg = if self.peek() == Some('-') {
            self.bump();
            self.skip_inline();
            true
        } else {
            false
        };
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            return Err(self.error(self.pos(), format!("expected a number, found {}", self.describe())));
        }
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn at_arrow(&self) -> bool {
        self.peek() == Some('-') && self.peek_at(1) == Some('>')
    }

    // ---- expressions -------------------------------------------------------

    fn expr(&mut self) -> Result<Expr, LsysError> {
        self.binary(1)
    }

    fn peek_binary_op(&self) -> Option<(BinaryOp, usize)> {
        let two = (self.peek(), self.peek_at(1));
        let op = match two {
            (Some('|'), Some('|')) => (BinaryOp::Or, 2),
            (Some('&'), Some('&')) => (BinaryOp::And, 2),
            (Some('='), Some('=')) => (BinaryOp::Eq, 2),
            (Some('!'), Some('=')) => (BinaryOp::Ne, 2),
            (Some('<'), Some('=')) => (BinaryOp::Le, 2),
            (Some('>'), Some('=')) => (BinaryOp::Ge, 2),
            (Some('<'), _) => (BinaryOp::Lt, 1),
            (Some('>'), _) => (BinaryOp::Gt, 1),
            (Some('+'), _) => (BinaryOp::Add, 1),
            (Some('-'), Some('>')) => return None,
            (Some('-'), _) => (BinaryOp::Sub, 1),
            (Some('*'), _) => (BinaryOp::Mul, 1),
            (Some('/'), _) => (BinaryOp::Div, 1),
            (Some('%'), _) => (BinaryOp::Rem, 1),
            _ => return None,
        };
        Some(op)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, LsysError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_inline();
            let Some((op, len)) = self.peek_binary_op() else {
                break;
            };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            for _ in 0..len {
                self.bump();
            }
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LsysError> {
        self.skip_inline();
        match self.peek() {
            Some('-') if !self.at_arrow() => {
                self.bump();
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            Some('!') if self.peek_at(1) != Some('=') => {
                self.bump();
                Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)))
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, LsysError> {
        let base = self.primary()?;
        self.skip_inline();
        if self.peek() == Some('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, LsysError> {
        self.skip_inline();
        let start = self.pos();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Num(self.number()?)),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_inline();
                if self.peek() != Some(')') {
                    return Err(self.error(start, "unclosed `(` in expression"));
                }
                self.bump();
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.ident().unwrap();
                self.skip_inline();
                if self.peek() == Some('(') {
                    self.bump();
                    let mut args = Vec::new();
                    self.skip_inline();
                    if self.peek() == Some(')') {
                        self.bump();
                    } else {
                        loop {
                            args.push(self.expr()?);
                            self.skip_inline();
                            match self.peek() {
                                Some(',') => {
                                    self.bump();
                                }
                                Some(')') => {
                                    self.bump();
                                    break;
                                }
                                _ => {
                                    return Err(self.error(
                                        start,
                                        format!("unclosed `(` in call to `{name}`"),
                                    ))
                                }
                            }
                        }
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(self.error(start, format!("expected an expression, found {}", self.describe()))),
        }
    }

    // ---- modules -------------------------------------------------------------

    fn is_symbol_char(c: char) -> bool {
        !(c.is_whitespace() || matches!(c, '(' | ')' | ',' | ';' | '#' | ':'))
    }

    /// Parses modules until end of line, `;`, or end of input.
    fn module_templates(&mut self) -> Result<Vec<(ModuleTemplate, Pos)>, LsysError> {
        let mut out = Vec::new();
        loop {
            self.skip_inline();
            let pos = self.pos();
            let Some(c) = self.peek() else { break };
            if c == '\n' || c == ';' {
                break;
            }
            if !Self::is_symbol_char(c) {
                return Err(self.error(pos, format!("expected a module symbol, found `{c}`")));
            }
            self.bump();
            let mut args = Vec::new();
            if self.peek() == Some('(') {
                let open = self.pos();
                self.bump();
                loop {
                    args.push(self.expr()?);
                    self.skip_inline();
                    match self.peek() {
                        Some(',') => {
                            self.bump();
                        }
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.error(open, format!("unclosed `(` after module `{c}`"))),
                    }
                }
            }
            out.push((ModuleTemplate { symbol: c, args }, pos));
        }
        Ok(out)
    }
}

struct Occurrence {
    symbol: char,
    arity: usize,
    pos: Pos,
}

struct ExprSite {
    expr: Expr,
    formals: Vec<String>,
    pos: Pos,
}

/// Parses and validates a program.
pub fn parse_lsystem(source: &str) -> Result<LSystemProgram, LsysError> {
    let mut cur = Cursor::new(source);
    let mut constants = BTreeMap::new();
    let mut curves = BTreeMap::new();
    let mut terminals = BTreeSet::new();
    let mut axiom: Vec<(ModuleTemplate, Pos)> = Vec::new();
    let mut productions: Vec<(Production, Pos, Vec<Pos>)> = Vec::new();
    let mut seen_sections = BTreeSet::new();

    loop {
        cur.skip_separators();
        if cur.at_end() {
            break;
        }
        let pos = cur.pos();
        let Some(section) = cur.peek_section() else {
            return Err(cur.error(
                pos,
                format!(
                    "expected a section header (constants:, curves:, terminals:, axiom:, productions:), found {}",
                    cur.describe()
                ),
            ));
        };
        if !seen_sections.insert(section) {
            return Err(cur.error(pos, format!("duplicate `{section}:` section")));
        }
        cur.consume_section(section);
        match section {
            "constants" => parse_constants(&mut cur, &mut constants)?,
            "curves" => parse_curves(&mut cur, &mut curves)?,
            "terminals" => {
                cur.skip_inline();
                while let Some(c) = cur.peek() {
                    if c == '\n' || c == ';' {
                        break;
                    }
                    if !Cursor::is_symbol_char(c) {
                        return Err(cur.error(cur.pos(), format!("invalid terminal symbol `{c}`")));
                    }
                    cur.bump();
                    terminals.insert(c);
                    cur.skip_inline();
                }
            }
            "axiom" => axiom = cur.module_templates()?,
            "productions" => loop {
                cur.skip_separators();
                if cur.at_end() || cur.peek_section().is_some() {
                    break;
                }
                productions.push(parse_production(&mut cur)?);
            },
            _ => unreachable!(),
        }
    }

    for name in curves.keys() {
        if builtin_arity(name).is_some() {
            return Err(LsysError::InvalidCurve {
                name: name.clone(),
                message: "curve name shadows a built-in function".into(),
            });
        }
    }

    validate(&constants, &curves, &terminals, &axiom, &productions)?;

    Ok(LSystemProgram {
        constants,
        curves,
        terminals,
        axiom: axiom.into_iter().map(|(m, _)| m).collect(),
        productions: productions.into_iter().map(|(p, _, _)| p).collect(),
    })
}

fn parse_constants(cur: &mut Cursor, constants: &mut BTreeMap<String, f64>) -> Result<(), LsysError> {
    loop {
        cur.skip_separators();
        if cur.at_end() || cur.peek_section().is_some() {
            return Ok(());
        }
        let pos = cur.pos();
        let name = cur
            .ident()
            .ok_or_else(|| cur.error(pos, format!("expected a constant name, found {}", cur.describe())))?;
        cur.expect('=', "`=`")?;
        let expr = cur.expr()?;
        let empty = BTreeMap::new();
        let scope = super::expr::Scope {
            formals: &[],
            values: &[],
            constants,
            curves: &empty,
        };
        // Constants may refer to earlier constants; randomness is not allowed.
        let mut calls = Vec::new();
        expr.calls(&mut calls);
        if calls.iter().any(|(n, _)| n == "rand" || n == "nrand") {
            return Err(cur.error(pos, "constants must be deterministic"));
        }
        let mut rng = fixed_rng();
        let value = expr.eval(&scope, &mut rng).map_err(|e| match e {
            super::expr::EvalError::UnknownIdentifier(n) => LsysError::UnknownIdentifier {
                name: n,
                line: pos.line,
                column: pos.column,
            },
            other => cur.error(pos, format!("cannot evaluate constant `{name}`: {other}")),
        })?;
        constants.insert(name, value);
    }
}

fn parse_curves(cur: &mut Cursor, curves: &mut BTreeMap<String, FunctionCurve>) -> Result<(), LsysError> {
    loop {
        cur.skip_separators();
        if cur.at_end() || cur.peek_section().is_some() {
            return Ok(());
        }
        let pos = cur.pos();
        let name = cur
            .ident()
            .ok_or_else(|| cur.error(pos, format!("expected a curve name, found {}", cur.describe())))?;
        cur.expect(':', "`:` after curve name")?;
        let mut points = Vec::new();
        loop {
            cur.skip_inline();
            match cur.peek() {
                Some('(') => {
                    let open = cur.pos();
                    cur.bump();
                    let x = cur.signed_number()?;
                    cur.expect(',', "`,` between knot coordinates")?;
                    let y = cur.signed_number()?;
                    cur.skip_inline();
                    if cur.peek() != Some(')') {
                        return Err(cur.error(open, "unclosed `(` in curve knot"));
                    }
                    cur.bump();
                    points.push((x, y));
                }
                None | Some('\n') | Some(';') => break,
                _ => return Err(cur.error(cur.pos(), format!("expected `(x, y)`, found {}", cur.describe()))),
            }
        }
        let curve = FunctionCurve::new(&points).map_err(|e| LsysError::InvalidCurve {
            name: name.clone(),
            message: format!("line {}: {e}", pos.line),
        })?;
        curves.insert(name, curve);
    }
}

fn parse_production(cur: &mut Cursor) -> Result<(Production, Pos, Vec<Pos>), LsysError> {
    cur.skip_inline();
    let pos = cur.pos();
    let predecessor = match cur.peek() {
        Some(c) if Cursor::is_symbol_char(c) => {
            cur.bump();
            c
        }
        _ => return Err(cur.error(pos, format!("expected a predecessor symbol, found {}", cur.describe()))),
    };
    let mut formals = Vec::new();
    if cur.peek() == Some('(') {
        let open = cur.pos();
        cur.bump();
        loop {
            cur.skip_inline();
            let fpos = cur.pos();
            let Some(name) = cur.ident() else {
                if cur.peek() == Some(')') && formals.is_empty() {
                    cur.bump();
                    break;
                }
                return Err(cur.error(fpos, format!("expected a parameter name, found {}", cur.describe())));
            };
            if formals.contains(&name) {
                return Err(cur.error(fpos, format!("duplicate parameter `{name}`")));
            }
            formals.push(name);
            cur.skip_inline();
            match cur.peek() {
                Some(',') => {
                    cur.bump();
                }
                Some(')') => {
                    cur.bump();
                    break;
                }
                _ => return Err(cur.error(open, "unclosed `(` in predecessor parameter list")),
            }
        }
    }
    cur.skip_inline();
    let guard = if cur.peek() == Some(':') {
        cur.bump();
        Some(cur.expr()?)
    } else {
        None
    };
    cur.skip_inline();
    if !cur.at_arrow() {
        return Err(cur.error(cur.pos(), format!("expected `->`, found {}", cur.describe())));
    }
    cur.bump();
    cur.bump();
    let succ = cur.module_templates()?;
    let positions = succ.iter().map(|(_, p)| *p).collect();
    Ok((
        Production {
            predecessor,
            formals,
            guard,
            successor: succ.into_iter().map(|(m, _)| m).collect(),
        },
        pos,
        positions,
    ))
}

fn validate(
    constants: &BTreeMap<String, f64>,
    curves: &BTreeMap<String, FunctionCurve>,
    terminals: &BTreeSet<char>,
    axiom: &[(ModuleTemplate, Pos)],
    productions: &[(Production, Pos, Vec<Pos>)],
) -> Result<(), LsysError> {
    let mut occurrences = Vec::new();
    let mut sites = Vec::new();
    for (m, pos) in axiom {
        occurrences.push(Occurrence {
            symbol: m.symbol,
            arity: m.args.len(),
            pos: *pos,
        });
        for a in &m.args {
            sites.push(ExprSite {
                expr: a.clone(),
                formals: Vec::new(),
                pos: *pos,
            });
        }
    }
    let predecessors: BTreeSet<char> = productions.iter().map(|(p, _, _)| p.predecessor).collect();
    for (p, pos, succ_pos) in productions {
        occurrences.push(Occurrence {
            symbol: p.predecessor,
            arity: p.formals.len(),
            pos: *pos,
        });
        if let Some(g) = &p.guard {
            sites.push(ExprSite {
                expr: g.clone(),
                formals: p.formals.clone(),
                pos: *pos,
            });
        }
        for (m, mpos) in p.successor.iter().zip(succ_pos) {
            if !(predecessors.contains(&m.symbol) || is_turtle_symbol(m.symbol) || terminals.contains(&m.symbol)) {
                return Err(LsysError::UndeclaredSymbol {
                    symbol: m.symbol,
                    line: mpos.line,
                    column: mpos.column,
                });
            }
            occurrences.push(Occurrence {
                symbol: m.symbol,
                arity: m.args.len(),
                pos: *mpos,
            });
            for a in &m.args {
                sites.push(ExprSite {
                    expr: a.clone(),
                    formals: p.formals.clone(),
                    pos: *mpos,
                });
            }
        }
    }

    let mut arity: HashMap<char, usize> = HashMap::new();
    for o in &occurrences {
        match arity.get(&o.symbol) {
            Some(&expected) if expected != o.arity => {
                return Err(LsysError::ArityMismatch {
                    symbol: o.symbol,
                    expected,
                    found: o.arity,
                    line: o.pos.line,
                    column: o.pos.column,
                })
            }
            Some(_) => {}
            None => {
                arity.insert(o.symbol, o.arity);
            }
        }
    }

    for site in &sites {
        let mut vars = Vec::new();
        site.expr.variables(&mut vars);
        for v in vars {
            if !(site.formals.contains(&v) || constants.contains_key(&v)) {
                return Err(LsysError::UnknownIdentifier {
                    name: v,
                    line: site.pos.line,
                    column: site.pos.column,
                });
            }
        }
        let mut calls = Vec::new();
        site.expr.calls(&mut calls);
        for (name, n) in calls {
            let expected = if curves.contains_key(&name) {
                Some(1)
            } else {
                builtin_arity(&name)
            };
            match expected {
                None => {
                    return Err(LsysError::UnknownIdentifier {
                        name,
                        line: site.pos.line,
                        column: site.pos.column,
                    })
                }
                Some(e) if e != n => {
                    return Err(LsysError::Syntax {
                        line: site.pos.line,
                        column: site.pos.column,
                        message: format!("`{name}` takes {e} argument(s), got {n}"),
                    })
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

fn fixed_rng() -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(0)
}

/// Parses a literal module string with numeric arguments.
pub fn parse_module_string(text: &str) -> Result<ModuleString, LsysError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    let empty_c = BTreeMap::new();
    let empty_k = BTreeMap::new();
    let scope = super::expr::Scope {
        formals: &[],
        values: &[],
        constants: &empty_c,
        curves: &empty_k,
    };
    let mut rng = fixed_rng();
    loop {
        cur.skip_separators();
        if cur.at_end() {
            break;
        }
        for (m, pos) in cur.module_templates()? {
            let mut args = Vec::with_capacity(m.args.len());
            for a in &m.args {
                let v = a
                    .eval(&scope, &mut rng)
                    .map_err(|e| cur.error(pos, format!("argument of `{}`: {e}", m.symbol)))?;
                args.push(v);
            }
            out.push(Module::new(m.symbol, args));
        }
    }
    Ok(ModuleString(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axiom_only() {
        let p = parse_lsystem("axiom: A(0)").unwrap();
        assert!(p.productions.is_empty());
        assert_eq!(p.axiom.len(), 1);
        assert_eq!(p.axiom[0].symbol, 'A');
        assert_eq!(p.axiom[0].args, vec![Expr::Num(0.0)]);
    }

    #[test]
    fn guarded_production_is_echoed() {
        let p = parse_lsystem("terminals: B\naxiom: A(0)\nproductions:\n  A(n) : n<3 -> A(n+1) B\n").unwrap();
        assert_eq!(p.productions.len(), 1);
        let prod = &p.productions[0];
        assert_eq!(prod.predecessor, 'A');
        assert_eq!(prod.formals, vec!["n".to_string()]);
        assert_eq!(prod.guard.as_ref().unwrap().to_string(), "n<3");
        assert_eq!(prod.successor.len(), 2);
        assert_eq!(prod.successor[0].to_string(), "A(n+1)");
        assert_eq!(prod.successor[1].symbol, 'B');
    }

    #[test]
    fn unclosed_paren_reports_its_position() {
        let err = parse_lsystem("productions:\nA(n -> B").unwrap_err();
        match err {
            LsysError::Syntax { line, column, message } => {
                assert_eq!((line, column), (2, 2), "{message}");
                assert!(message.contains("unclosed"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_successor_symbol() {
        let err = parse_lsystem("axiom: A\nproductions:\nA -> A Q").unwrap_err();
        assert!(matches!(err, LsysError::UndeclaredSymbol { symbol: 'Q', line: 3, column: 8 }), "{err:?}");
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_lsystem("axiom: A(1)\nproductions:\nA(x) -> A(x, 2)").unwrap_err();
        assert!(matches!(err, LsysError::ArityMismatch { symbol: 'A', expected: 1, found: 2, .. }), "{err:?}");
    }

    #[test]
    fn non_increasing_knots() {
        let err = parse_lsystem("curves:\n  c: (0, 1) (0, 2)\naxiom: F").unwrap_err();
        assert!(matches!(err, LsysError::InvalidCurve { .. }), "{err:?}");
    }

    #[test]
    fn unknown_identifier_in_guard() {
        let err = parse_lsystem("axiom: A(0)\nproductions:\nA(n) : m < 2 -> A(n)").unwrap_err();
        assert!(matches!(err, LsysError::UnknownIdentifier { ref name, .. } if name == "m"), "{err:?}");
    }

    #[test]
    fn inline_productions_and_constants() {
        let p = parse_lsystem(
            "constants:\n  a = 2; b = a * 3\naxiom: A\nproductions: A -> A B; B -> A\n",
        )
        .unwrap();
        assert_eq!(p.constant("b"), Some(6.0));
        assert_eq!(p.productions.len(), 2);
    }

    #[test]
    fn module_string_literal() {
        let s = parse_module_string("F(1) [+(90) F(-0.5)] A(2,3)").unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.0[3].args, vec![-0.5]);
        assert_eq!(s.0[5].args, vec![2.0, 3.0]);
    }
}
