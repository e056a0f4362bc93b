//! Sorted terms, grammars and problems shared by every other module.

mod grammar;
mod ops;
mod problem;
mod sort;
mod subst;
mod term;

pub use grammar::{GTerm, Grammar, GrammarError, Nonterminal};
pub use ops::{Op, Theory};
pub use problem::{Definition, Logic, Macro, Problem, ProblemError, Solution, SynthTarget, TargetGrammar};
pub use sort::{Sort, MAX_BV_WIDTH};
pub use subst::{expand_macros, inline_lets, substitute_targets, substitute_vars, SubstError};
pub use term::{FunSig, Func, SortError, Symbol, Term, TermKind};

/// Node count of the parse tree.
pub fn term_size(t: &Term) -> usize {
    t.size()
}
