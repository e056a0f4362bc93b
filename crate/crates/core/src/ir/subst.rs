//! Structural rewriting: variable substitution, target substitution and
//! macro inlining.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{Func, Macro, Solution, Symbol, Term, TermKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("no implementation bound for target `{0}`")]
    UnboundTarget(Symbol),
    #[error("`{name}` applied to {found} arguments but defined with {expected}")]
    Arity { name: Symbol, expected: usize, found: usize },
    #[error("macro `{0}` is recursive")]
    Recursion(Symbol),
}

/// Capture-avoiding simultaneous substitution of free variables.
pub fn substitute_vars(t: &Term, map: &HashMap<Symbol, Term>) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    let incoming: BTreeSet<Symbol> = map.values().flat_map(|r| r.free_vars()).collect();
    subst_rec(t, map, &incoming, &mut 0)
}

fn subst_rec(t: &Term, map: &HashMap<Symbol, Term>, incoming: &BTreeSet<Symbol>, fresh: &mut usize) -> Term {
    match t.kind() {
        TermKind::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        TermKind::Lit(_) => t.clone(),
        TermKind::App(_, args) => {
            let new: Vec<Term> = args.iter().map(|a| subst_rec(a, map, incoming, fresh)).collect();
            if new.iter().zip(args).all(|(a, b)| a.ptr_eq(b)) {
                t.clone()
            } else {
                t.with_args(new)
            }
        }
        TermKind::Let(binds, body) => {
            let mut inner = map.clone();
            let mut new_binds = Vec::with_capacity(binds.len());
            for (v, e) in binds {
                let e = subst_rec(e, map, incoming, fresh);
                inner.remove(v);
                if incoming.contains(v) {
                    // the bound name would capture a free variable of a replacement
                    let renamed = fresh_name(v, incoming, fresh);
                    inner.insert(v.clone(), Term::var(renamed.clone(), e.sort()));
                    new_binds.push((renamed, e));
                } else {
                    new_binds.push((v.clone(), e));
                }
            }
            let mut inc = incoming.clone();
            inc.extend(new_binds.iter().map(|(v, _)| v.clone()));
            Term::let_in(new_binds, subst_rec(body, &inner, &inc, fresh))
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<Symbol>, counter: &mut usize) -> Symbol {
    loop {
        *counter += 1;
        let cand: Symbol = format!("{base}__{counter}").into();
        if !avoid.contains(&cand) {
            return cand;
        }
    }
}

/// Replaces every application of a target with its implementation, binding
/// formal parameters to the actual arguments.
pub fn substitute_targets(c: &Term, sol: &Solution, targets: &[Symbol]) -> Result<Term, SubstError> {
    rewrite_calls(c, &mut |name, args| {
        if let Some(def) = sol.get(name) {
            if def.params.len() != args.len() {
                return Err(SubstError::Arity { name: name.into(), expected: def.params.len(), found: args.len() });
            }
            let map = def.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
            Ok(Some(substitute_vars(&def.body, &map)))
        } else if targets.iter().any(|t| &**t == name) {
            Err(SubstError::UnboundTarget(name.into()))
        } else {
            Ok(None)
        }
    })
}

/// Inlines all macro applications, including macros used by other macros.
pub fn expand_macros(t: &Term, macros: &[Macro]) -> Result<Term, SubstError> {
    let mut expanded: HashMap<Symbol, Term> = HashMap::new();
    let mut stack = Vec::new();
    expand_with(t, macros, &mut expanded, &mut stack)
}

fn expand_with(
    t: &Term,
    macros: &[Macro],
    expanded: &mut HashMap<Symbol, Term>,
    stack: &mut Vec<Symbol>,
) -> Result<Term, SubstError> {
    rewrite_calls(t, &mut |name, args| {
        let Some(m) = macros.iter().find(|m| &*m.name == name) else {
            return Ok(None);
        };
        if m.params.len() != args.len() {
            return Err(SubstError::Arity { name: m.name.clone(), expected: m.params.len(), found: args.len() });
        }
        let body = match expanded.get(name) {
            Some(b) => b.clone(),
            None => {
                if stack.iter().any(|s| &**s == name) {
                    return Err(SubstError::Recursion(m.name.clone()));
                }
                stack.push(m.name.clone());
                let b = expand_with(&m.body, macros, expanded, stack)?;
                stack.pop();
                expanded.insert(m.name.clone(), b.clone());
                b
            }
        };
        let map = m.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
        Ok(Some(substitute_vars(&body, &map)))
    })
}

/// Replaces `let` binders by substituting their definitions into the body.
pub fn inline_lets(t: &Term) -> Term {
    match t.kind() {
        TermKind::Var(_) | TermKind::Lit(_) => t.clone(),
        TermKind::App(_, args) => t.with_args(args.iter().map(inline_lets).collect()),
        TermKind::Let(binds, body) => {
            let map = binds.iter().map(|(v, e)| (v.clone(), inline_lets(e))).collect();
            substitute_vars(&inline_lets(body), &map)
        }
    }
}

/// Bottom-up rewrite of user-function applications. `f` receives the
/// already-rewritten arguments and returns a replacement, or `None` to keep
/// the application.
fn rewrite_calls<E>(
    t: &Term,
    f: &mut impl FnMut(&str, &[Term]) -> Result<Option<Term>, E>,
) -> Result<Term, E> {
    match t.kind() {
        TermKind::Var(_) | TermKind::Lit(_) => Ok(t.clone()),
        TermKind::App(func, args) => {
            let new = args.iter().map(|a| rewrite_calls(a, f)).collect::<Result<Vec<_>, _>>()?;
            if let Func::User(name) = func {
                if let Some(r) = f(name, &new)? {
                    return Ok(r);
                }
            }
            if new.iter().zip(args).all(|(a, b)| a.ptr_eq(b)) {
                Ok(t.clone())
            } else {
                Ok(t.with_args(new))
            }
        }
        TermKind::Let(binds, body) => {
            let binds = binds
                .iter()
                .map(|(v, e)| Ok((v.clone(), rewrite_calls(e, f)?)))
                .collect::<Result<Vec<_>, E>>()?;
            Ok(Term::let_in(binds, rewrite_calls(body, f)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Definition, FunSig, Op, Sort};

    fn x() -> Term {
        Term::var("x", Sort::Int)
    }

    fn sig(name: &str, n: usize) -> FunSig {
        FunSig { name: name.into(), params: vec![Sort::Int; n], ret: Sort::Int }
    }

    fn def(body: Term) -> Definition {
        Definition { params: vec![("x".into(), Sort::Int)], body }
    }

    #[test]
    fn abs_substitution() {
        let abs_x = Term::call(&sig("abs", 1), vec![x()]).unwrap();
        let c = Term::app(Op::Ge, vec![abs_x, Term::int(0)]).unwrap();
        let body = Term::ite(
            Term::app(Op::Ge, vec![x(), Term::int(0)]).unwrap(),
            x(),
            Term::app(Op::Sub, vec![x(), Term::int(0)]).unwrap(),
        )
        .unwrap();
        let sol = Solution::from([("abs".into(), def(body))]);
        let out = substitute_targets(&c, &sol, &["abs".into()]).unwrap();
        assert_eq!(out.to_string(), "(>= (ite (>= x 0) x (- x 0)) 0)");
    }

    #[test]
    fn nullary_and_nested() {
        let f0 = Term::call(&sig("f", 0), vec![]).unwrap();
        let c = Term::app(Op::Eq, vec![f0, Term::int(1)]).unwrap();
        let sol = Solution::from([("f".into(), Definition { params: vec![], body: Term::int(1) })]);
        assert_eq!(substitute_targets(&c, &sol, &["f".into()]).unwrap().to_string(), "(= 1 1)");

        let ffx = Term::call(&sig("f", 1), vec![Term::call(&sig("f", 1), vec![x()]).unwrap()]).unwrap();
        let sol = Solution::from([("f".into(), def(Term::app(Op::Add, vec![x(), Term::int(1)]).unwrap()))]);
        assert_eq!(substitute_targets(&ffx, &sol, &["f".into()]).unwrap().to_string(), "(+ (+ x 1) 1)");
    }

    #[test]
    fn errors() {
        let fx = Term::call(&sig("f", 1), vec![x()]).unwrap();
        assert_eq!(
            substitute_targets(&fx, &Solution::new(), &["f".into()]),
            Err(SubstError::UnboundTarget("f".into()))
        );
        let sol = Solution::from([("f".into(), Definition { params: vec![], body: Term::int(1) })]);
        assert!(matches!(substitute_targets(&fx, &sol, &["f".into()]), Err(SubstError::Arity { .. })));
    }

    #[test]
    fn capture_is_avoided() {
        // f(y) := (let ((x 1)) (+ x y)); applying f to x must not capture x
        let y = Term::var("y", Sort::Int);
        let body = Term::let_in(
            vec![("x".into(), Term::int(1))],
            Term::app(Op::Add, vec![x(), y.clone()]).unwrap(),
        );
        let sol = Solution::from([("f".into(), Definition { params: vec![("y".into(), Sort::Int)], body })]);
        let fx = Term::call(&sig("f", 1), vec![x()]).unwrap();
        let out = substitute_targets(&fx, &sol, &["f".into()]).unwrap();
        assert_eq!(out.to_string(), "(let ((x__1 1)) (+ x__1 x))");
        assert_eq!(inline_lets(&out).to_string(), "(+ 1 x)");
    }

    #[test]
    fn recursive_macro_is_rejected() {
        let m = Macro {
            name: "r".into(),
            params: vec![("x".into(), Sort::Int)],
            ret: Sort::Int,
            body: Term::call(&sig("r", 1), vec![x()]).unwrap(),
        };
        let t = Term::call(&sig("r", 1), vec![Term::int(0)]).unwrap();
        assert_eq!(expand_macros(&t, &[m]), Err(SubstError::Recursion("r".into())));
    }
}
