//! SyGuS-IF reader and printer.

mod defaults;
mod desugar;
mod emit;
mod parse;
pub mod sexpr;

use thiserror::Error;

use crate::ir::{Logic, ProblemError};

pub use defaults::default_grammar;
pub use desugar::{desugar_invariant, InvariantSpec};
pub use emit::{emit_definition, emit_problem, emit_solution};
pub use parse::{parse, parse_solution, parse_term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: lexical error: {msg}")]
    Lex { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: parse error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: sort error: {msg}")]
    Sort { line: usize, col: usize, msg: String },
    #[error("unsupported logic `{0}`")]
    UnsupportedLogic(String),
    #[error("cannot desugar invariant constraint: {0}")]
    Desugar(String),
    #[error("logic {0} has no default grammar")]
    UnsupportedDefaultGrammar(Logic),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
