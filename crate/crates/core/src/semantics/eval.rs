use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use super::strings;
use super::{BitVec, Value};
use crate::ir::{Definition, Func, Macro, Op, Problem, Solution, Symbol, Term, TermKind};

/// A concrete assignment to universally quantified variables.
pub type Point = BTreeMap<Symbol, Value>;

const MAX_CALL_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Symbol),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("call depth exceeded while evaluating `{0}`")]
    DepthExceeded(String),
}

/// Resolves user-function applications during evaluation.
pub trait FunEnv {
    fn call(&self, name: &str, args: &[Value], depth: usize) -> Result<Value, EvalError>;
}

/// No user functions in scope.
pub struct NoFuns;

impl FunEnv for NoFuns {
    fn call(&self, name: &str, _: &[Value], _: usize) -> Result<Value, EvalError> {
        Err(EvalError::UnknownFunction(name.to_string()))
    }
}

/// Macros plus (optionally) target implementations, evaluated call-by-value.
pub struct Defs<'a> {
    pub macros: &'a [Macro],
    pub solution: Option<&'a Solution>,
}

impl<'a> Defs<'a> {
    pub fn macros(macros: &'a [Macro]) -> Self {
        Defs { macros, solution: None }
    }

    pub fn with_solution(macros: &'a [Macro], solution: &'a Solution) -> Self {
        Defs { macros, solution: Some(solution) }
    }
}

impl FunEnv for Defs<'_> {
    fn call(&self, name: &str, args: &[Value], depth: usize) -> Result<Value, EvalError> {
        if depth > MAX_CALL_DEPTH {
            return Err(EvalError::DepthExceeded(name.to_string()));
        }
        if let Some(def) = self.solution.and_then(|s| s.get(name)) {
            return call_definition(def, args, self, depth);
        }
        let m = self
            .macros
            .iter()
            .find(|m| &*m.name == name)
            .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        let mut vars: Vec<(Symbol, Value)> = m.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
        ev(&m.body, &mut vars, None, self, depth + 1)
    }
}

/// Evaluates a definition body with its parameters bound to `args`.
pub fn call_definition(def: &Definition, args: &[Value], funs: &dyn FunEnv, depth: usize) -> Result<Value, EvalError> {
    if def.params.len() != args.len() {
        return Err(EvalError::SortMismatch(format!("expected {} arguments, got {}", def.params.len(), args.len())));
    }
    let mut vars: Vec<(Symbol, Value)> = def.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
    ev(&def.body, &mut vars, None, funs, depth + 1)
}

/// Evaluates a term with no user functions in scope.
pub fn eval(t: &Term, env: &Point) -> Result<Value, EvalError> {
    ev(t, &mut Vec::new(), Some(env), &NoFuns, 0)
}

/// Evaluates a term, resolving user functions through `funs`.
pub fn eval_in(t: &Term, env: &Point, funs: &dyn FunEnv) -> Result<Value, EvalError> {
    ev(t, &mut Vec::new(), Some(env), funs, 0)
}

/// Evaluates a term whose free variables are bound positionally.
pub fn eval_with_vars(t: &Term, vars: &[(Symbol, Value)], funs: &dyn FunEnv) -> Result<Value, EvalError> {
    ev(t, &mut vars.to_vec(), None, funs, 0)
}

/// True iff every constraint holds at `p` once the solution is plugged in.
pub fn eval_constraints(problem: &Problem, solution: &Solution, p: &Point) -> Result<bool, EvalError> {
    let defs = Defs::with_solution(&problem.macros, solution);
    for c in &problem.constraints {
        if !truth(&eval_in(c, p, &defs)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn truth(v: &Value) -> Result<bool, EvalError> {
    v.as_bool().ok_or_else(|| EvalError::SortMismatch(format!("expected Bool, got {v}")))
}

fn ev(
    t: &Term,
    vars: &mut Vec<(Symbol, Value)>,
    base: Option<&Point>,
    funs: &dyn FunEnv,
    depth: usize,
) -> Result<Value, EvalError> {
    match t.kind() {
        TermKind::Var(v) => {
            if let Some((_, val)) = vars.iter().rev().find(|(n, _)| n == v) {
                return Ok(val.clone());
            }
            base.and_then(|b| b.get(v)).cloned().ok_or_else(|| EvalError::UnboundVariable(v.clone()))
        }
        TermKind::Lit(v) => Ok(v.clone()),
        TermKind::App(Func::Theory(Op::Ite), args) => {
            let c = truth(&ev(&args[0], vars, base, funs, depth)?)?;
            ev(&args[if c { 1 } else { 2 }], vars, base, funs, depth)
        }
        TermKind::App(Func::Theory(Op::And), args) => {
            for a in args {
                if !truth(&ev(a, vars, base, funs, depth)?)? {
                    return Ok(Value::Bool(false));
                }
            }
            Ok(Value::Bool(true))
        }
        TermKind::App(Func::Theory(Op::Or), args) => {
            for a in args {
                if truth(&ev(a, vars, base, funs, depth)?)? {
                    return Ok(Value::Bool(true));
                }
            }
            Ok(Value::Bool(false))
        }
        TermKind::App(func, args) => {
            let vals = args.iter().map(|a| ev(a, vars, base, funs, depth)).collect::<Result<Vec<_>, _>>()?;
            match func {
                Func::Theory(op) => apply_op(*op, &vals),
                Func::User(name) => funs.call(name, &vals, depth),
            }
        }
        TermKind::Let(binds, body) => {
            // parallel let: all right-hand sides see the outer scope
            let vals = binds.iter().map(|(_, e)| ev(e, vars, base, funs, depth)).collect::<Result<Vec<_>, _>>()?;
            let n = vars.len();
            vars.extend(binds.iter().map(|(v, _)| v.clone()).zip(vals));
            let r = ev(body, vars, base, funs, depth);
            vars.truncate(n);
            r
        }
    }
}

fn mismatch(op: Op, args: &[Value]) -> EvalError {
    let shown: Vec<String> = args.iter().map(|v| v.to_string()).collect();
    EvalError::SortMismatch(format!("`{}` applied to ({})", op, shown.join(" ")))
}

fn ints(op: Op, args: &[Value]) -> Result<Vec<&BigInt>, EvalError> {
    args.iter().map(|a| a.as_int().ok_or_else(|| mismatch(op, args))).collect()
}

fn strs(op: Op, args: &[Value]) -> Result<Vec<&str>, EvalError> {
    args.iter().map(|a| a.as_str().ok_or_else(|| mismatch(op, args))).collect()
}

fn bvs(op: Op, args: &[Value]) -> Result<Vec<BitVec>, EvalError> {
    let out: Vec<BitVec> = args.iter().map(|a| a.as_bv().ok_or_else(|| mismatch(op, args))).collect::<Result<_, _>>()?;
    if out.windows(2).any(|w| w[0].width() != w[1].width()) {
        return Err(mismatch(op, args));
    }
    Ok(out)
}

fn shift_amount(b: BitVec) -> Option<u32> {
    (b.bits() < b.width() as u64).then_some(b.bits() as u32)
}

/// Applies a theory operator to evaluated arguments.
pub fn apply_op(op: Op, args: &[Value]) -> Result<Value, EvalError> {
    use Op::*;
    let bool_arg = |i: usize| args.get(i).and_then(Value::as_bool).ok_or_else(|| mismatch(op, args));
    Ok(match op {
        Not => Value::Bool(!bool_arg(0)?),
        And => Value::Bool(args.iter().map(truth).collect::<Result<Vec<_>, _>>()?.iter().all(|b| *b)),
        Or => Value::Bool(args.iter().map(truth).collect::<Result<Vec<_>, _>>()?.iter().any(|b| *b)),
        Implies => Value::Bool(!bool_arg(0)? || bool_arg(1)?),
        Xor => Value::Bool(bool_arg(0)? != bool_arg(1)?),
        Eq => Value::Bool(args.windows(2).all(|w| w[0] == w[1])),
        Distinct => {
            Value::Bool(args.iter().enumerate().all(|(i, a)| args[i + 1..].iter().all(|b| a != b)))
        }
        Ite => {
            if bool_arg(0)? {
                args[1].clone()
            } else {
                args[2].clone()
            }
        }
        Add => Value::Int(ints(op, args)?.into_iter().sum()),
        Sub => {
            let xs = ints(op, args)?;
            if xs.len() == 1 {
                Value::Int(-xs[0])
            } else {
                Value::Int(xs[1..].iter().fold(xs[0].clone(), |acc, x| acc - *x))
            }
        }
        Mul => Value::Int(ints(op, args)?.into_iter().product()),
        Lt | Le | Gt | Ge => {
            let xs = ints(op, args)?;
            let (a, b) = (xs[0], xs[1]);
            Value::Bool(match op {
                Lt => a < b,
                Le => a <= b,
                Gt => a > b,
                _ => a >= b,
            })
        }
        BvNot | BvNeg => {
            let a = bvs(op, args)?[0];
            let bits = if op == BvNot { !a.bits() } else { a.bits().wrapping_neg() };
            Value::BitVec(BitVec::new(a.width(), bits))
        }
        BvAnd | BvOr | BvXor | BvAdd | BvSub | BvMul | BvShl | BvLshr | BvAshr => {
            let xs = bvs(op, args)?;
            let (a, b) = (xs[0], xs[1]);
            let w = a.width();
            let bits = match op {
                BvAnd => a.bits() & b.bits(),
                BvOr => a.bits() | b.bits(),
                BvXor => a.bits() ^ b.bits(),
                BvAdd => a.bits().wrapping_add(b.bits()),
                BvSub => a.bits().wrapping_sub(b.bits()),
                BvMul => a.bits().wrapping_mul(b.bits()),
                BvShl => shift_amount(b).map_or(0, |s| a.bits() << s),
                BvLshr => shift_amount(b).map_or(0, |s| a.bits() >> s),
                _ => {
                    let s = shift_amount(b).unwrap_or(w - 1).min(w - 1);
                    (a.signed() >> s) as u64
                }
            };
            Value::BitVec(BitVec::new(w, bits))
        }
        BvUlt | BvUle | BvUgt | BvUge | BvSlt | BvSle | BvSgt | BvSge => {
            let xs = bvs(op, args)?;
            let (a, b) = (xs[0], xs[1]);
            let (ua, ub, sa, sb) = (a.bits(), b.bits(), a.signed(), b.signed());
            Value::Bool(match op {
                BvUlt => ua < ub,
                BvUle => ua <= ub,
                BvUgt => ua > ub,
                BvUge => ua >= ub,
                BvSlt => sa < sb,
                BvSle => sa <= sb,
                BvSgt => sa > sb,
                _ => sa >= sb,
            })
        }
        StrConcat => Value::Str(strings::concat(&strs(op, args)?)),
        StrLen => Value::Int(strings::len(strs(op, args)?[0])),
        StrAt | StrSubstr => {
            let s = args.first().and_then(Value::as_str).ok_or_else(|| mismatch(op, args))?;
            let is = ints(op, &args[1..])?;
            Value::Str(if op == StrAt { strings::at(s, is[0]) } else { strings::substr(s, is[0], is[1]) })
        }
        StrPrefixOf | StrSuffixOf | StrContains => {
            let xs = strs(op, args)?;
            Value::Bool(match op {
                StrPrefixOf => strings::prefix_of(xs[0], xs[1]),
                StrSuffixOf => strings::suffix_of(xs[0], xs[1]),
                _ => strings::contains(xs[0], xs[1]),
            })
        }
        StrIndexOf => {
            let xs = strs(op, &args[..2])?;
            let i = args.get(2).and_then(Value::as_int).ok_or_else(|| mismatch(op, args))?;
            Value::Int(strings::index_of(xs[0], xs[1], i))
        }
        StrReplace => {
            let xs = strs(op, args)?;
            Value::Str(strings::replace(xs[0], xs[1], xs[2]))
        }
        StrToInt => Value::Int(strings::to_int(strs(op, args)?[0])),
        IntToStr => Value::Str(strings::from_int(ints(op, args)?[0])),
    })
}
