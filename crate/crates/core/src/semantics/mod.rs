//! Ground-truth interpreter for closed terms over linear integer arithmetic,
//! bitvectors and strings.

mod eval;
pub mod strings;
mod value;

pub use eval::{apply_op, call_definition, eval, eval_constraints, eval_in, eval_with_vars, Defs, EvalError, FunEnv, NoFuns, Point};
pub(crate) use eval::truth;
pub use value::{quote_string, BitVec, Value};
