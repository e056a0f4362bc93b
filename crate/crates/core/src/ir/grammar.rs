use std::fmt;

use thiserror::Error;

use super::{Func, FunSig, Op, Sort, Symbol, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar has no nonterminals")]
    Empty,
    #[error("start nonterminal index {0} does not exist")]
    MissingStart(usize),
    #[error("duplicate nonterminal `{0}`")]
    DuplicateNonterminal(Symbol),
    #[error("production refers to undeclared nonterminal #{0}")]
    UnknownNonterminal(usize),
    #[error("production `{production}` of `{nonterminal}` has sort {found}, expected {expected}")]
    SortMismatch { nonterminal: Symbol, production: String, found: Sort, expected: Sort },
    #[error("ill-sorted production: {0}")]
    IllSorted(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nonterminal {
    pub name: Symbol,
    pub sort: Sort,
}

/// A production template: a term whose leaves may be nonterminal placeholders.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GTerm {
    Nt(usize),
    Leaf(Term),
    App { func: Func, args: Vec<GTerm>, sort: Sort },
}

impl GTerm {
    /// Applies a theory operator to templates, resolving placeholder sorts
    /// through `nts`.
    pub fn theory(op: Op, args: Vec<GTerm>, nts: &[Nonterminal]) -> Result<GTerm, GrammarError> {
        let sorts = args.iter().map(|a| a.sort(nts)).collect::<Result<Vec<_>, _>>()?;
        let sort = op.result_sort(&sorts).map_err(GrammarError::IllSorted)?;
        Ok(GTerm::App { func: Func::Theory(op), args, sort })
    }

    pub fn call(sig: &FunSig, args: Vec<GTerm>, nts: &[Nonterminal]) -> Result<GTerm, GrammarError> {
        let sorts = args.iter().map(|a| a.sort(nts)).collect::<Result<Vec<_>, _>>()?;
        if sorts != sig.params {
            return Err(GrammarError::IllSorted(format!(
                "`{}` applied to arguments of sorts {:?}, expected {:?}",
                sig.name, sorts, sig.params
            )));
        }
        Ok(GTerm::App { func: Func::User(sig.name.clone()), args, sort: sig.ret })
    }

    pub fn sort(&self, nts: &[Nonterminal]) -> Result<Sort, GrammarError> {
        match self {
            GTerm::Nt(i) => nts.get(*i).map(|n| n.sort).ok_or(GrammarError::UnknownNonterminal(*i)),
            GTerm::Leaf(t) => Ok(t.sort()),
            GTerm::App { sort, .. } => Ok(*sort),
        }
    }

    /// Nodes contributed by the template itself, excluding placeholders.
    pub fn skeleton_size(&self) -> usize {
        match self {
            GTerm::Nt(_) => 0,
            GTerm::Leaf(t) => t.size(),
            GTerm::App { args, .. } => 1 + args.iter().map(GTerm::skeleton_size).sum::<usize>(),
        }
    }

    /// Placeholders in left-to-right order.
    pub fn holes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<usize>) {
        match self {
            GTerm::Nt(i) => out.push(*i),
            GTerm::Leaf(_) => {}
            GTerm::App { args, .. } => args.iter().for_each(|a| a.collect_holes(out)),
        }
    }

    pub fn is_unit(&self) -> Option<usize> {
        match self {
            GTerm::Nt(i) => Some(*i),
            _ => None,
        }
    }

    /// Fills placeholders left to right.
    pub fn instantiate(&self, fillers: &[Term]) -> Term {
        let mut it = fillers.iter();
        let t = self.fill(&mut it);
        debug_assert!(it.next().is_none(), "too many fillers");
        t
    }

    fn fill<'a>(&self, it: &mut impl Iterator<Item = &'a Term>) -> Term {
        match self {
            GTerm::Nt(_) => it.next().expect("too few fillers").clone(),
            GTerm::Leaf(t) => t.clone(),
            GTerm::App { func, args, sort } => {
                let args = args.iter().map(|a| a.fill(it)).collect();
                Term::app_unchecked(func.clone(), args, *sort)
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, nts: &[Nonterminal]) -> fmt::Result {
        match self {
            GTerm::Nt(i) => f.write_str(&nts[*i].name),
            GTerm::Leaf(t) => write!(f, "{t}"),
            GTerm::App { func, args, .. } => {
                write!(f, "({}", func.name())?;
                for a in args {
                    f.write_str(" ")?;
                    a.write(f, nts)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A syntactic constraint: nonterminals with sorts and production templates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grammar {
    nonterminals: Vec<Nonterminal>,
    start: usize,
    productions: Vec<Vec<GTerm>>,
}

impl Grammar {
    pub fn new(
        nonterminals: Vec<Nonterminal>,
        start: usize,
        productions: Vec<Vec<GTerm>>,
    ) -> Result<Grammar, GrammarError> {
        if nonterminals.is_empty() {
            return Err(GrammarError::Empty);
        }
        if start >= nonterminals.len() || productions.len() != nonterminals.len() {
            return Err(GrammarError::MissingStart(start));
        }
        for (i, nt) in nonterminals.iter().enumerate() {
            if nonterminals[..i].iter().any(|o| o.name == nt.name) {
                return Err(GrammarError::DuplicateNonterminal(nt.name.clone()));
            }
        }
        for (nt, prods) in nonterminals.iter().zip(&productions) {
            for p in prods {
                if let Some(h) = p.holes().into_iter().find(|&h| h >= nonterminals.len()) {
                    return Err(GrammarError::UnknownNonterminal(h));
                }
                let found = p.sort(&nonterminals)?;
                if found != nt.sort {
                    return Err(GrammarError::SortMismatch {
                        nonterminal: nt.name.clone(),
                        production: p.display(&nonterminals).to_string(),
                        found,
                        expected: nt.sort,
                    });
                }
            }
        }
        Ok(Grammar { nonterminals, start, productions })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn start_sort(&self) -> Sort {
        self.nonterminals[self.start].sort
    }

    pub fn nonterminals(&self) -> &[Nonterminal] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, i: usize) -> &Nonterminal {
        &self.nonterminals[i]
    }

    pub fn len(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nonterminals.is_empty()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| &*n.name == name)
    }

    pub fn productions(&self, nt: usize) -> &[GTerm] {
        &self.productions[nt]
    }

    /// Nonterminals reachable from `nt` through unit productions `A ::= B`,
    /// including `nt` itself, in discovery order.
    pub fn unit_closure(&self, nt: usize) -> Vec<usize> {
        let mut seen = vec![nt];
        let mut i = 0;
        while i < seen.len() {
            let cur = seen[i];
            for p in &self.productions[cur] {
                if let Some(next) = p.is_unit() {
                    if !seen.contains(&next) {
                        seen.push(next);
                    }
                }
            }
            i += 1;
        }
        seen
    }

    /// Largest skeleton size and placeholder count over non-unit productions.
    pub fn production_bounds(&self) -> (usize, usize) {
        self.productions
            .iter()
            .flatten()
            .filter(|p| p.is_unit().is_none())
            .fold((0, 0), |(k, h), p| (k.max(p.skeleton_size()), h.max(p.holes().len())))
    }

    pub fn display_production<'a>(&'a self, p: &'a GTerm) -> impl fmt::Display + 'a {
        p.display(&self.nonterminals)
    }
}

impl GTerm {
    pub fn display<'a>(&'a self, nts: &'a [Nonterminal]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a GTerm, &'a [Nonterminal]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write(f, self.1)
            }
        }
        D(self, nts)
    }
}

/// SyGuS grammar block: `((Start Int (x 0 (+ Start Start))) ...)` in
/// declaration order.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let nt = &self.nonterminals[i];
            write!(f, "({} {} (", nt.name, nt.sort)?;
            for (j, p) in self.productions[i].iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                p.write(f, &self.nonterminals)?;
            }
            f.write_str("))")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nts() -> Vec<Nonterminal> {
        vec![Nonterminal { name: "S".into(), sort: Sort::Int }]
    }

    fn plus_grammar() -> Grammar {
        let nts = nts();
        let plus = GTerm::theory(Op::Add, vec![GTerm::Nt(0), GTerm::Nt(0)], &nts).unwrap();
        Grammar::new(nts, 0, vec![vec![GTerm::Leaf(Term::int(0)), GTerm::Leaf(Term::int(1)), plus]]).unwrap()
    }

    #[test]
    fn display() {
        assert_eq!(plus_grammar().to_string(), "((S Int (0 1 (+ S S))))");
    }

    #[test]
    fn instantiate_fills_left_to_right() {
        let g = plus_grammar();
        let plus = &g.productions(0)[2];
        assert_eq!(plus.skeleton_size(), 1);
        let t = plus.instantiate(&[Term::int(0), Term::int(1)]);
        assert_eq!(t.to_string(), "(+ 0 1)");
        assert_eq!(g.production_bounds(), (1, 2));
    }

    #[test]
    fn rejects_sort_mismatch_and_unknown_placeholder() {
        let err = Grammar::new(nts(), 0, vec![vec![GTerm::Leaf(Term::bool(true))]]).unwrap_err();
        assert!(matches!(err, GrammarError::SortMismatch { .. }));
        let err = Grammar::new(nts(), 0, vec![vec![GTerm::Nt(3)]]).unwrap_err();
        assert_eq!(err, GrammarError::UnknownNonterminal(3));
        assert_eq!(Grammar::new(nts(), 1, vec![vec![]]).unwrap_err(), GrammarError::MissingStart(1));
    }

    #[test]
    fn unit_closure_follows_chains() {
        let nts = vec![
            Nonterminal { name: "Start".into(), sort: Sort::Int },
            Nonterminal { name: "A".into(), sort: Sort::Int },
            Nonterminal { name: "B".into(), sort: Sort::Int },
        ];
        let g = Grammar::new(
            nts,
            0,
            vec![vec![GTerm::Nt(1)], vec![GTerm::Nt(2), GTerm::Leaf(Term::int(1))], vec![GTerm::Nt(0)]],
        )
        .unwrap();
        assert_eq!(g.unit_closure(0), vec![0, 1, 2]);
        assert_eq!(g.unit_closure(2), vec![2, 0, 1]);
    }
}
