use super::FrontendError;
use crate::ir::{FunSig, Op, Problem, Sort, Symbol, Term};

/// An `inv-constraint` directive: the invariant target and the names of the
/// pre-condition, transition relation and post-condition macros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSpec {
    pub inv: Symbol,
    pub state_vars: Vec<(Symbol, Sort)>,
    pub pre: Symbol,
    pub trans: Symbol,
    pub post: Symbol,
}

fn desugar_err(msg: String) -> FrontendError {
    FrontendError::Desugar(msg)
}

fn call(sig: &FunSig, args: Vec<Term>) -> Result<Term, FrontendError> {
    Term::call(sig, args).map_err(|e| desugar_err(format!("`{}`: {}", sig.name, e.0)))
}

fn implies(a: Term, b: Term) -> Term {
    Term::app(Op::Implies, vec![a, b]).expect("Boolean operands")
}

/// Appends the three verification conditions of `spec`:
/// `pre => inv`, `inv /\ trans => inv'` and `inv => post`.
pub fn desugar_invariant(spec: &InvariantSpec, mut problem: Problem) -> Result<Problem, FrontendError> {
    let n = spec.state_vars.len();
    let sorts: Vec<Sort> = spec.state_vars.iter().map(|v| v.1).collect();
    let sig_of = |name: &Symbol| {
        problem.fun_sig(name).ok_or_else(|| desugar_err(format!("`{name}` is not defined")))
    };
    let inv = sig_of(&spec.inv)?;
    let (pre, trans, post) = (sig_of(&spec.pre)?, sig_of(&spec.trans)?, sig_of(&spec.post)?);
    let doubled: Vec<Sort> = sorts.iter().chain(&sorts).copied().collect();
    for (sig, want) in [(&inv, &sorts), (&pre, &sorts), (&trans, &doubled), (&post, &sorts)] {
        if &sig.params != want || sig.ret != Sort::Bool {
            return Err(desugar_err(format!(
                "`{}` must map {} state arguments to Bool",
                sig.name,
                want.len()
            )));
        }
    }
    debug_assert_eq!(doubled.len(), 2 * n);

    let mut cur = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    for (v, s) in &spec.state_vars {
        let primed: Symbol = format!("{v}!").into();
        for name in [v, &primed] {
            if problem.universal_sort(name) != Some(*s) {
                return Err(desugar_err(format!("state variable `{name}` is not declared with sort {s}")));
            }
        }
        cur.push(Term::var(v.clone(), *s));
        next.push(Term::var(primed, *s));
    }
    let both: Vec<Term> = cur.iter().chain(&next).cloned().collect();

    let inv_cur = call(&inv, cur.clone())?;
    let step = Term::app(Op::And, vec![inv_cur.clone(), call(&trans, both)?]).expect("Boolean operands");
    problem.constraints.push(implies(call(&pre, cur.clone())?, inv_cur.clone()));
    problem.constraints.push(implies(step, call(&inv, next)?));
    problem.constraints.push(implies(inv_cur, call(&post, cur)?));
    Ok(problem)
}
