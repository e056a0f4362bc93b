//! Post-processing of candidate solutions: grammar conformance first, then
//! semantic verification.

mod conformance;
mod smt;
mod verify;

use crate::ir::{Problem, Solution, Symbol};
use crate::semantics::Point;

pub use conformance::{check_conformance, check_solution_conformance, Conformance};
pub use smt::{external_check, parse_model, smt_script, SmtConfig};
pub use verify::{first_violated, verify};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Counterexample(Point),
    NonConformant { target: Symbol, path: Vec<usize> },
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Integer grid radius for the exhaustive tier.
    pub int_bound: i64,
    /// Largest number of grid points tried before falling back to sampling.
    pub grid_cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub smt: Option<SmtConfig>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { int_bound: 64, grid_cap: 200_000, samples: 10_000, seed: 0, smt: None }
    }
}

/// Conformance first, then semantics.
pub fn post_process(problem: &Problem, solution: &Solution, cfg: &VerifyConfig) -> Verdict {
    if let Err((target, path)) = check_solution_conformance(problem, solution) {
        return Verdict::NonConformant { target, path };
    }
    verify(problem, solution, cfg)
}
