//! Parametric L-systems: parsing, parallel rewriting and turtle interpretation.

mod curve;
mod derive;
pub mod expr;
mod parse;
mod program;
mod turtle;

pub use curve::{eval_function_curve, FunctionCurve};
pub use derive::{axiom_string, derive, step};
pub use expr::EvalError;
pub use parse::{parse_lsystem, parse_module_string};
pub use program::{is_turtle_symbol, LSystemProgram, Module, ModuleString, ModuleTemplate, Production, TURTLE_SYMBOLS};
pub use turtle::{interpret, LeafPlacement, OrganLabel, Primitive, Segment, TurtleConfig, TurtleState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LsysError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared symbol `{symbol}` at {line}:{column}")]
    UndeclaredSymbol { symbol: char, line: usize, column: usize },
    #[error("symbol `{symbol}` used with {found} argument(s) at {line}:{column}, but elsewhere with {expected}")]
    ArityMismatch {
        symbol: char,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
    #[error("unknown identifier `{name}` at {line}:{column}")]
    UnknownIdentifier { name: String, line: usize, column: usize },
    #[error("curve `{name}`: {message}")]
    InvalidCurve { name: String, message: String },
    #[error("{0}")]
    BadCurve(String),
    #[error("no constant named `{0}`")]
    UnknownConstant(String),
    #[error("evaluating axiom: {source}")]
    AxiomEval { source: EvalError },
    #[error("production #{production} `{rule}`: {source}")]
    Eval {
        production: usize,
        rule: String,
        source: EvalError,
    },
    #[error("unbalanced brackets at module {index}")]
    UnbalancedBrackets { index: usize },
    #[error("unknown turtle command `{symbol}` at module {index}")]
    UnknownCommand { symbol: char, index: usize },
}
