//! Arithmetic expressions used in module arguments and production guards.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::FunctionCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
}

impl BinaryOp {
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
            BinaryOp::Pow => 8,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Pow => "^",
        }
    }
}

const UNARY_PRECEDENCE: u8 = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

/// Built-in functions and their arities.
pub const BUILTINS: &[(&str, usize)] = &[
    ("sin", 1),
    ("cos", 1),
    ("tan", 1),
    ("sqrt", 1),
    ("abs", 1),
    ("floor", 1),
    ("ceil", 1),
    ("round", 1),
    ("exp", 1),
    ("ln", 1),
    ("min", 2),
    ("max", 2),
    ("pow", 2),
    ("clamp", 3),
    ("rand", 2),
    ("nrand", 2),
];

pub fn builtin_arity(name: &str) -> Option<usize> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("non-finite result in `{0}`")]
    NonFinite(String),
    #[error("invalid argument to `{0}`")]
    Domain(String),
}

/// Variable bindings for one evaluation: formal parameters shadow constants.
pub struct Scope<'a> {
    pub formals: &'a [String],
    pub values: &'a [f64],
    pub constants: &'a BTreeMap<String, f64>,
    pub curves: &'a BTreeMap<String, FunctionCurve>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.formals
            .iter()
            .position(|f| f == name)
            .map(|i| self.values[i])
            .or_else(|| self.constants.get(name).copied())
    }
}

impl Expr {
    pub fn eval<R: Rng + ?Sized>(&self, scope: &Scope<'_>, rng: &mut R) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => scope
                .lookup(name)
                .ok_or_else(|| EvalError::UnknownIdentifier(name.clone()))?,
            Expr::Unary(op, e) => {
                let v = e.eval(scope, rng)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Not => truth(v == 0.0),
                }
            }
            Expr::Binary(op, a, b) => {
                // Short-circuit the logical operators.
                match op {
                    BinaryOp::And => {
                        return Ok(if a.eval(scope, rng)? == 0.0 {
                            0.0
                        } else {
                            truth(b.eval(scope, rng)? != 0.0)
                        });
                    }
                    BinaryOp::Or => {
                        return Ok(if a.eval(scope, rng)? != 0.0 {
                            1.0
                        } else {
                            truth(b.eval(scope, rng)? != 0.0)
                        });
                    }
                    _ => {}
                }
                let x = a.eval(scope, rng)?;
                let y = b.eval(scope, rng)?;
                match op {
                    BinaryOp::Eq => truth(x == y),
                    BinaryOp::Ne => truth(x != y),
                    BinaryOp::Lt => truth(x < y),
                    BinaryOp::Le => truth(x <= y),
                    BinaryOp::Gt => truth(x > y),
                    BinaryOp::Ge => truth(x >= y),
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div | BinaryOp::Rem if y == 0.0 => {
                        return Err(EvalError::DivisionByZero)
                    }
                    BinaryOp::Div => x / y,
                    BinaryOp::Rem => x.rem_euclid(y),
                    BinaryOp::Pow => x.powf(y),
                    BinaryOp::And | BinaryOp::Or => unreachable!(),
                }
            }
            Expr::Call(name, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(a.eval(scope, rng)?);
                }
                call(name, &vals, scope, rng)?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.to_string()))
        }
    }

    /// Identifiers referenced as variables (not function names).
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(n) => out.push(n.clone()),
            Expr::Unary(_, e) => e.variables(out),
            Expr::Binary(_, a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.variables(out)),
        }
    }

    /// Function names referenced by calls.
    pub fn calls(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Unary(_, e) => e.calls(out),
            Expr::Binary(_, a, b) => {
                a.calls(out);
                b.calls(out);
            }
            Expr::Call(n, args) => {
                out.push((n.clone(), args.len()));
                args.iter().for_each(|a| a.calls(out));
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(..) => UNARY_PRECEDENCE,
            _ => u8::MAX,
        }
    }
}

fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn call<R: Rng + ?Sized>(
    name: &str,
    a: &[f64],
    scope: &Scope<'_>,
    rng: &mut R,
) -> Result<f64, EvalError> {
    if let Some(curve) = scope.curves.get(name) {
        return Ok(curve.eval(a[0]));
    }
    let domain = || EvalError::Domain(name.to_string());
    Ok(match name {
        "sin" => a[0].to_radians().sin(),
        "cos" => a[0].to_radians().cos(),
        "tan" => a[0].to_radians().tan(),
        "sqrt" if a[0] < 0.0 => return Err(domain()),
        "sqrt" => a[0].sqrt(),
        "abs" => a[0].abs(),
        "floor" => a[0].floor(),
        "ceil" => a[0].ceil(),
        "round" => a[0].round(),
        "exp" => a[0].exp(),
        "ln" if a[0] <= 0.0 => return Err(domain()),
        "ln" => a[0].ln(),
        "min" => a[0].min(a[1]),
        "max" => a[0].max(a[1]),
        "pow" => a[0].powf(a[1]),
        "clamp" => a[0].max(a[1]).min(a[2]),
        "rand" => {
            let (lo, hi) = (a[0], a[1]);
            lo + (hi - lo) * rng.random::<f64>()
        }
        "nrand" => {
            if a[1] < 0.0 {
                return Err(domain());
            }
            Normal::new(a[0], a[1]).map_err(|_| domain())?.sample(rng)
        }
        _ => return Err(EvalError::UnknownFunction(name.to_string())),
    })
}

pub(crate) fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{}` on f64 is the shortest representation that parses back exactly.
    write!(f, "{v}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => {
                f.write_str("(")?;
                fmt_number(*v, f)?;
                f.write_str(")")
            }
            Expr::Num(v) => fmt_number(*v, f),
            Expr::Var(n) => f.write_str(n),
            Expr::Unary(op, e) => {
                f.write_str(match op {
                    UnaryOp::Neg => "-",
                    UnaryOp::Not => "!",
                })?;
                if e.precedence() < UNARY_PRECEDENCE {
                    write!(f, "({e})")
                } else {
                    write!(f, "{e}")
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                // `^` is right-associative, everything else left-associative.
                let (left_paren, right_paren) = if *op == BinaryOp::Pow {
                    (a.precedence() <= p, b.precedence() < p)
                } else {
                    (a.precedence() < p, b.precedence() <= p)
                };
                if left_paren {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "{}", op.symbol())?;
                if right_paren {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Expr::Call(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
