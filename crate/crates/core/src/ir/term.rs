use std::collections::BTreeSet;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use super::{Op, Sort};
use crate::semantics::Value;

pub type Symbol = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("sort error: {0}")]
pub struct SortError(pub String);

/// The head of an application: a theory operator, or a user function
/// (macro or synthesis target) resolved by name against a [`super::Problem`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Theory(Op),
    User(Symbol),
}

impl Func {
    pub fn name(&self) -> &str {
        match self {
            Func::Theory(op) => op.name(),
            Func::User(name) => name,
        }
    }
}

/// Declared signature of a user function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunSig {
    pub name: Symbol,
    pub params: Vec<Sort>,
    pub ret: Sort,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Var(Symbol),
    Lit(Value),
    App(Func, Vec<Term>),
    Let(Vec<(Symbol, Term)>, Term),
}

#[derive(Debug)]
struct Node {
    kind: TermKind,
    sort: Sort,
    size: usize,
    hash: u64,
}

/// An immutable, sorted expression tree. Sort and size are computed once at
/// construction; cloning is a reference-count bump.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    fn build(kind: TermKind, sort: Sort) -> Term {
        let size = match &kind {
            TermKind::Var(_) | TermKind::Lit(_) => 1,
            TermKind::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            // one binder node, one node per binding pair, then the subterms
            TermKind::Let(binds, body) => {
                1 + binds.iter().map(|(_, e)| 1 + e.size()).sum::<usize>() + body.size()
            }
        };
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        sort.hash(&mut h);
        Term(Arc::new(Node { kind, sort, size, hash: h.finish() }))
    }

    pub fn var(name: impl Into<Symbol>, sort: Sort) -> Term {
        Term::build(TermKind::Var(name.into()), sort)
    }

    pub fn lit(value: Value) -> Term {
        let sort = value.sort();
        Term::build(TermKind::Lit(value), sort)
    }

    pub fn int(n: i64) -> Term {
        Term::lit(Value::int(n))
    }

    pub fn bool(b: bool) -> Term {
        Term::lit(Value::Bool(b))
    }

    /// Applies a theory operator, checking arity and argument sorts.
    pub fn app(op: Op, args: Vec<Term>) -> Result<Term, SortError> {
        let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
        let sort = op.result_sort(&sorts).map_err(SortError)?;
        Ok(Term::build(TermKind::App(Func::Theory(op), args), sort))
    }

    /// Applies a user function against its declared signature.
    pub fn call(sig: &FunSig, args: Vec<Term>) -> Result<Term, SortError> {
        if sig.params.len() != args.len() {
            return Err(SortError(format!(
                "`{}` expects {} arguments, got {}",
                sig.name,
                sig.params.len(),
                args.len()
            )));
        }
        for (i, (want, arg)) in sig.params.iter().zip(&args).enumerate() {
            if *want != arg.sort() {
                return Err(SortError(format!(
                    "argument {} of `{}` has sort {}, expected {}",
                    i + 1,
                    sig.name,
                    arg.sort(),
                    want
                )));
            }
        }
        Ok(Term::build(TermKind::App(Func::User(sig.name.clone()), args), sig.ret))
    }

    /// Rebuilds an application with the same head and new arguments of the
    /// same sorts.
    pub fn with_args(&self, args: Vec<Term>) -> Term {
        match self.kind() {
            TermKind::App(f, old) => {
                debug_assert!(old.iter().zip(&args).all(|(a, b)| a.sort() == b.sort()));
                Term::build(TermKind::App(f.clone(), args), self.sort())
            }
            _ => self.clone(),
        }
    }

    /// Builds an application whose head and sort were validated elsewhere
    /// (grammar templates check their productions once, up front).
    pub(crate) fn app_unchecked(func: Func, args: Vec<Term>, sort: Sort) -> Term {
        Term::build(TermKind::App(func, args), sort)
    }

    pub fn let_in(bindings: Vec<(Symbol, Term)>, body: Term) -> Term {
        let sort = body.sort();
        Term::build(TermKind::Let(bindings, body), sort)
    }

    pub fn ite(cond: Term, then: Term, els: Term) -> Result<Term, SortError> {
        Term::app(Op::Ite, vec![cond, then, els])
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    /// Number of nodes in the parse tree.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.kind() {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_lit(&self) -> Option<&Value> {
        match self.kind() {
            TermKind::Lit(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<(&Func, &[Term])> {
        match self.kind() {
            TermKind::App(f, args) => Some((f, args)),
            _ => None,
        }
    }

    /// True when the term applies the named user function anywhere.
    pub fn mentions_fun(&self, name: &str) -> bool {
        match self.kind() {
            TermKind::Var(_) | TermKind::Lit(_) => false,
            TermKind::App(f, args) => {
                matches!(f, Func::User(n) if &**n == name) || args.iter().any(|a| a.mentions_fun(name))
            }
            TermKind::Let(binds, body) => {
                binds.iter().any(|(_, e)| e.mentions_fun(name)) || body.mentions_fun(name)
            }
        }
    }

    /// Names of user functions applied in the term.
    pub fn user_funs(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_user_funs(&mut out);
        out
    }

    fn collect_user_funs(&self, out: &mut BTreeSet<Symbol>) {
        match self.kind() {
            TermKind::Var(_) | TermKind::Lit(_) => {}
            TermKind::App(f, args) => {
                if let Func::User(n) = f {
                    out.insert(n.clone());
                }
                args.iter().for_each(|a| a.collect_user_funs(out));
            }
            TermKind::Let(binds, body) => {
                binds.iter().for_each(|(_, e)| e.collect_user_funs(out));
                body.collect_user_funs(out);
            }
        }
    }

    /// Free variables, respecting let scoping.
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match self.kind() {
            TermKind::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            TermKind::Lit(_) => {}
            TermKind::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            TermKind::Let(binds, body) => {
                binds.iter().for_each(|(_, e)| e.collect_free(bound, out));
                let n = bound.len();
                bound.extend(binds.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Literal values occurring in the term.
    pub fn literals(&self) -> Vec<Value> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let TermKind::Lit(v) = t.kind() {
                out.push(v.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self.kind() {
            TermKind::Var(_) | TermKind::Lit(_) => {}
            TermKind::App(_, args) => args.iter().for_each(|a| a.visit(f)),
            TermKind::Let(binds, body) => {
                binds.iter().for_each(|(_, e)| e.visit(f));
                body.visit(f);
            }
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.sort == other.0.sort && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// SyGuS concrete syntax.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Var(v) => f.write_str(v),
            TermKind::Lit(v) => write!(f, "{v}"),
            TermKind::App(func, args) => {
                write!(f, "({}", func.name())?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            TermKind::Let(binds, body) => {
                f.write_str("(let (")?;
                for (i, (v, e)) in binds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({v} {e})")?;
                }
                write!(f, ") {body})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x", Sort::Int)
    }

    fn qm_sig() -> FunSig {
        FunSig { name: "qm".into(), params: vec![Sort::Int, Sort::Int], ret: Sort::Int }
    }

    #[test]
    fn sizes() {
        assert_eq!(x().size(), 1);
        let inner = Term::app(Op::Sub, vec![x(), Term::int(1)]).unwrap();
        let qm = Term::call(&qm_sig(), vec![inner, Term::int(7)]).unwrap();
        assert_eq!(qm.size(), 5);
        let one = Term::app(Op::Add, vec![Term::int(0), Term::int(1)]).unwrap();
        let sum = Term::app(Op::Add, vec![one.clone(), one]).unwrap();
        assert_eq!(sum.size(), 7);
    }

    #[test]
    fn let_size_convention() {
        // (let ((a (+ x 1))) (+ a a)): 1 binder + (1 + 3) binding + 3 body
        let e = Term::app(Op::Add, vec![x(), Term::int(1)]).unwrap();
        let a = Term::var("a", Sort::Int);
        let body = Term::app(Op::Add, vec![a.clone(), a]).unwrap();
        let t = Term::let_in(vec![("a".into(), e)], body);
        assert_eq!(t.size(), 8);
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec![Symbol::from("x")]);
    }

    #[test]
    fn ill_sorted_construction_fails_fast() {
        assert!(Term::app(Op::Add, vec![x(), Term::bool(true)]).is_err());
        assert!(Term::call(&qm_sig(), vec![x()]).is_err());
    }

    #[test]
    fn structural_equality_and_display() {
        let a = Term::app(Op::Sub, vec![x(), Term::int(1)]).unwrap();
        let b = Term::app(Op::Sub, vec![x(), Term::int(1)]).unwrap();
        assert_eq!(a, b);
        assert!(!a.ptr_eq(&b));
        assert_eq!(a.to_string(), "(- x 1)");
    }
}
