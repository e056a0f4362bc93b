use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{FunSig, Grammar, Op, Sort, Symbol, Term, TermKind, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    Lia,
    Bv,
    Slia,
}

impl Logic {
    pub fn supports(self, theory: Theory) -> bool {
        match (self, theory) {
            (_, Theory::Core) => true,
            (Logic::Lia, Theory::Ints) => true,
            (Logic::Bv, Theory::BitVecs) => true,
            (Logic::Slia, Theory::Ints | Theory::Strings) => true,
            _ => false,
        }
    }

    pub fn supports_sort(self, sort: Sort) -> bool {
        match sort {
            Sort::Bool => true,
            Sort::Int => self != Logic::Bv,
            Sort::String => self == Logic::Slia,
            Sort::BitVec(_) => self == Logic::Bv,
        }
    }
}

impl FromStr for Logic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LIA" => Ok(Logic::Lia),
            "BV" => Ok(Logic::Bv),
            "SLIA" => Ok(Logic::Slia),
            other => Err(other.to_string()),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Lia => "LIA",
            Logic::Bv => "BV",
            Logic::Slia => "SLIA",
        })
    }
}

/// A `define-fun`: a non-recursive function definition usable in constraints
/// and grammars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Macro {
    pub name: Symbol,
    pub params: Vec<(Symbol, Sort)>,
    pub ret: Sort,
    pub body: Term,
}

impl Macro {
    pub fn sig(&self) -> FunSig {
        FunSig { name: self.name.clone(), params: self.params.iter().map(|p| p.1).collect(), ret: self.ret }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetGrammar {
    Explicit(Grammar),
    /// No grammar was given; the logic's default grammar applies.
    Default(Grammar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthTarget {
    pub name: Symbol,
    pub params: Vec<(Symbol, Sort)>,
    pub ret: Sort,
    pub grammar: TargetGrammar,
}

impl SynthTarget {
    pub fn sig(&self) -> FunSig {
        FunSig { name: self.name.clone(), params: self.params.iter().map(|p| p.1).collect(), ret: self.ret }
    }

    pub fn grammar(&self) -> &Grammar {
        match &self.grammar {
            TargetGrammar::Explicit(g) | TargetGrammar::Default(g) => g,
        }
    }

    pub fn has_default_grammar(&self) -> bool {
        matches!(self.grammar, TargetGrammar::Default(_))
    }
}

/// A candidate implementation of one target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Definition {
    pub params: Vec<(Symbol, Sort)>,
    pub body: Term,
}

/// Maps each target name to its implementation.
pub type Solution = BTreeMap<Symbol, Definition>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(Symbol),
    #[error("constraint `{0}` is not Boolean")]
    NonBooleanConstraint(String),
    #[error("`{name}` refers to unknown symbol `{symbol}`")]
    UnknownSymbol { name: String, symbol: Symbol },
    #[error("operator `{op}` is not part of logic {logic}")]
    OpNotInLogic { op: Op, logic: Logic },
    #[error("sort {sort} is not part of logic {logic}")]
    SortNotInLogic { sort: Sort, logic: Logic },
    #[error("target `{0}` grammar start sort differs from its return sort")]
    GrammarSort(Symbol),
}

/// A full synthesis benchmark. Universals are implicitly universally
/// quantified over every constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub logic: Logic,
    pub universals: Vec<(Symbol, Sort)>,
    pub macros: Vec<Macro>,
    pub targets: Vec<SynthTarget>,
    pub constraints: Vec<Term>,
}

impl Problem {
    pub fn macro_def(&self, name: &str) -> Option<&Macro> {
        self.macros.iter().find(|m| &*m.name == name)
    }

    pub fn target(&self, name: &str) -> Option<&SynthTarget> {
        self.targets.iter().find(|t| &*t.name == name)
    }

    pub fn target_names(&self) -> Vec<Symbol> {
        self.targets.iter().map(|t| t.name.clone()).collect()
    }

    pub fn universal_sort(&self, name: &str) -> Option<Sort> {
        self.universals.iter().find(|(n, _)| &**n == name).map(|p| p.1)
    }

    pub fn fun_sig(&self, name: &str) -> Option<FunSig> {
        self.macro_def(name).map(Macro::sig).or_else(|| self.target(name).map(SynthTarget::sig))
    }

    /// Checks the cross-reference invariants: unique names, Boolean
    /// constraints over known symbols, operators and sorts within the logic.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let mut names: Vec<&Symbol> = Vec::new();
        for n in self
            .universals
            .iter()
            .map(|u| &u.0)
            .chain(self.macros.iter().map(|m| &m.name))
            .chain(self.targets.iter().map(|t| &t.name))
        {
            if names.contains(&n) {
                return Err(ProblemError::Duplicate(n.clone()));
            }
            names.push(n);
        }
        for (_, s) in &self.universals {
            self.check_sort(*s)?;
        }
        for m in &self.macros {
            let scope: Vec<&str> = m.params.iter().map(|p| &*p.0).collect();
            self.check_term(&m.name, &m.body, &scope)?;
        }
        for t in &self.targets {
            self.check_sort(t.ret)?;
            if t.grammar().start_sort() != t.ret {
                return Err(ProblemError::GrammarSort(t.name.clone()));
            }
        }
        let scope: Vec<&str> = self.universals.iter().map(|u| &*u.0).collect();
        for c in &self.constraints {
            if c.sort() != Sort::Bool {
                return Err(ProblemError::NonBooleanConstraint(c.to_string()));
            }
            self.check_term("constraint", c, &scope)?;
        }
        Ok(())
    }

    fn check_sort(&self, sort: Sort) -> Result<(), ProblemError> {
        if self.logic.supports_sort(sort) {
            Ok(())
        } else {
            Err(ProblemError::SortNotInLogic { sort, logic: self.logic })
        }
    }

    fn check_term(&self, owner: &str, t: &Term, scope: &[&str]) -> Result<(), ProblemError> {
        let unknown = |s: &Symbol| ProblemError::UnknownSymbol { name: owner.to_string(), symbol: s.clone() };
        match t.kind() {
            TermKind::Var(v) => {
                if scope.contains(&&**v) {
                    Ok(())
                } else {
                    Err(unknown(v))
                }
            }
            TermKind::Lit(v) => self.check_sort(v.sort()),
            TermKind::App(f, args) => {
                match f {
                    super::Func::Theory(op) => {
                        if !self.logic.supports(op.theory()) {
                            return Err(ProblemError::OpNotInLogic { op: *op, logic: self.logic });
                        }
                    }
                    super::Func::User(n) => {
                        if self.fun_sig(n).is_none() {
                            return Err(unknown(n));
                        }
                    }
                }
                args.iter().try_for_each(|a| self.check_term(owner, a, scope))
            }
            TermKind::Let(binds, body) => {
                binds.iter().try_for_each(|(_, e)| self.check_term(owner, e, scope))?;
                let mut inner = scope.to_vec();
                inner.extend(binds.iter().map(|(v, _)| &**v));
                self.check_term(owner, body, &inner)
            }
        }
    }
}
