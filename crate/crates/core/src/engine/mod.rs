//! Bottom-up enumerative synthesis with counterexample-guided refinement,
//! and a divide-and-conquer unification engine on top of the same banks.

mod cegis;
mod enumerate;
mod nuggets;
mod pbe;
mod spec;
mod unify;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ir::{Problem, Solution};
use crate::oracle::VerifyConfig;

pub use cegis::cegis_solve;
pub use enumerate::{enumerate_next, EnumState, Entry, Enumerator, Grow};
pub use nuggets::{bv_sample, compose_nuggets, generate_nuggets};
pub use pbe::{extract_pbe_points, pbe_solve, Examples};
pub use unify::unify_solve;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Failure {
    #[error("timeout")]
    Timeout,
    #[error("grammar exhausted without a solution")]
    GrammarExhausted,
    #[error("term size cap {0} reached")]
    SizeCap(usize),
    #[error("term bank limit reached")]
    BankLimit,
    #[error("conflicting examples for the same input")]
    ConflictingExamples,
    #[error("no candidate can satisfy the collected points")]
    Unrealizable,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal: {0}")]
    Internal(String),
}

/// Wall-clock deadline plus resource caps shared by every search loop.
#[derive(Clone, Debug)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_bank: usize,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None, max_bank: usize::MAX }
    }

    pub fn new(timeout: Option<Duration>, max_bank: usize) -> Self {
        Budget { deadline: timeout.map(|t| Instant::now() + t), max_bank }
    }

    pub fn check(&self) -> Result<(), Failure> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Failure::Timeout),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Cegis,
    Unif,
    #[default]
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cegis" => Ok(Mode::Cegis),
            "unif" => Ok(Mode::Unif),
            "auto" => Ok(Mode::Auto),
            other => Err(format!("unknown engine `{other}` (expected cegis, unif or auto)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub mode: Mode,
    pub max_term_size: usize,
    pub max_pred_size: usize,
    pub timeout: Option<Duration>,
    pub max_bank: usize,
    pub max_iterations: usize,
    pub verify: VerifyConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Auto,
            max_term_size: 12,
            max_pred_size: 9,
            timeout: None,
            max_bank: 2_000_000,
            max_iterations: 500,
            verify: VerifyConfig { samples: 2_000, ..VerifyConfig::default() },
        }
    }
}

impl EngineConfig {
    pub fn budget(&self) -> Budget {
        Budget::new(self.timeout, self.max_bank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub solution: Solution,
    /// True when the oracle proved the solution; false when it only found no
    /// counterexample within its bounds.
    pub verified: bool,
    pub iterations: usize,
}

/// Solves each independent group of targets with the engine `cfg.mode`
/// selects, and merges the results.
pub fn solve(problem: &Problem, cfg: &EngineConfig) -> Result<Outcome, Failure> {
    let budget = cfg.budget();
    let parts = spec::split(problem);
    let mut out = Outcome { solution: Solution::new(), verified: true, iterations: 0 };
    for part in &parts {
        let o = solve_part(part, cfg, &budget)?;
        out.solution.extend(o.solution);
        out.verified &= o.verified;
        out.iterations += o.iterations;
    }
    Ok(out)
}

fn solve_part(problem: &Problem, cfg: &EngineConfig, budget: &Budget) -> Result<Outcome, Failure> {
    match cfg.mode {
        Mode::Cegis => cegis::run(problem, cfg, budget),
        Mode::Unif => unify::run(problem, cfg, budget),
        Mode::Auto => {
            if let Some(ex) = extract_pbe_points(problem)? {
                return pbe::run(problem, &ex, cfg, budget);
            }
            if unify::applicable(problem) {
                unify::run(problem, cfg, budget)
            } else {
                cegis::run(problem, cfg, budget)
            }
        }
    }
}
