use std::collections::HashSet;
use std::sync::Arc;

use super::{Budget, Failure};
use crate::ir::{Func, GTerm, Grammar, Macro, Symbol, Term, TermKind};
use crate::semantics::{apply_op, eval_with_vars, Defs, EvalError, FunEnv, Value};

/// A stored term with its values on the enumerator's inputs.
#[derive(Clone, Debug)]
pub struct Entry {
    pub term: Term,
    pub vals: Arc<[Value]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grow {
    /// A complete new size level was built.
    Level,
    /// No larger term can exist.
    Exhausted,
    /// The visitor asked to stop; the current level is incomplete.
    Stopped,
}

/// Bottom-up enumeration of a grammar by term size. Each nonterminal keeps a
/// bank per size; with pruning on, a term is dropped when another term of the
/// same nonterminal already produced the same values on every input.
pub struct Enumerator<'a> {
    grammar: &'a Grammar,
    macros: &'a [Macro],
    params: Vec<Symbol>,
    inputs: Vec<Vec<Value>>,
    prune: bool,
    prods: Vec<Vec<&'a GTerm>>,
    banks: Vec<Vec<Vec<Entry>>>,
    seen: Vec<HashSet<Arc<[Value]>>>,
    levels: Vec<usize>,
    last_nonempty: usize,
    bounds: (usize, usize),
    total: usize,
    ticks: usize,
}

impl<'a> Enumerator<'a> {
    /// `inputs` are argument tuples for the grammar's parameters (in
    /// `params` order); every stored term carries its value on each.
    pub fn new(
        grammar: &'a Grammar,
        macros: &'a [Macro],
        params: &[(Symbol, crate::ir::Sort)],
        inputs: Vec<Vec<Value>>,
        prune: bool,
    ) -> Self {
        let n = grammar.len();
        let prods = (0..n)
            .map(|nt| {
                let mut out: Vec<&GTerm> = Vec::new();
                for c in grammar.unit_closure(nt) {
                    out.extend(grammar.productions(c).iter().filter(|p| p.is_unit().is_none()));
                }
                out
            })
            .collect();
        Enumerator {
            grammar,
            macros,
            params: params.iter().map(|p| p.0.clone()).collect(),
            inputs,
            prune,
            prods,
            banks: vec![vec![Vec::new()]; n],
            seen: vec![HashSet::new(); n],
            levels: vec![0; n],
            last_nonempty: 0,
            bounds: grammar.production_bounds(),
            total: 0,
            ticks: 0,
        }
    }

    pub fn grammar(&self) -> &'a Grammar {
        self.grammar
    }

    pub fn inputs(&self) -> &[Vec<Value>] {
        &self.inputs
    }

    /// Largest size level completed for every nonterminal.
    pub fn size(&self) -> usize {
        self.levels.iter().copied().min().unwrap_or(0)
    }

    /// Largest size level completed for `nt`.
    pub fn level(&self, nt: usize) -> usize {
        self.levels[nt]
    }

    pub fn bank(&self, nt: usize, size: usize) -> &[Entry] {
        self.banks[nt].get(size).map_or(&[], Vec::as_slice)
    }

    /// Every stored term of `nt` in enumeration order.
    pub fn entries(&self, nt: usize) -> impl Iterator<Item = &Entry> {
        self.banks[nt].iter().flatten()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_exhausted(&self) -> bool {
        let (k, h) = self.bounds;
        self.size() >= k + h * self.last_nonempty
    }

    pub fn seen(&self, nt: usize, vals: &[Value]) -> bool {
        self.seen[nt].contains(vals)
    }

    /// Builds the next size level, calling `visit` on every kept entry.
    pub fn grow(&mut self, budget: &Budget, mut visit: impl FnMut(usize, &Entry) -> bool) -> Result<Grow, Failure> {
        if self.is_exhausted() {
            return Ok(Grow::Exhausted);
        }
        let s = self.size() + 1;
        for nt in 0..self.grammar.len() {
            if self.levels[nt] < s && self.build_level(nt, budget, &mut visit)? {
                return Ok(Grow::Stopped);
            }
        }
        Ok(Grow::Level)
    }

    /// Builds levels of `nt` up to `size`, and of other nonterminals only as
    /// far as those levels need.
    pub fn ensure(
        &mut self,
        nt: usize,
        size: usize,
        budget: &Budget,
        visit: &mut dyn FnMut(usize, &Entry) -> bool,
    ) -> Result<bool, Failure> {
        while self.levels[nt] < size {
            let s = self.levels[nt] + 1;
            let deps: Vec<usize> = self.prods[nt].iter().flat_map(|p| p.holes()).collect();
            for d in deps {
                if d != nt && self.ensure(d, s - 1, budget, visit)? {
                    return Ok(true);
                }
            }
            if self.build_level(nt, budget, visit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Builds every level a size-`size` term of `nt` can draw subterms from.
    pub fn ensure_below(&mut self, nt: usize, size: usize, budget: &Budget) -> Result<(), Failure> {
        let deps: Vec<usize> = self.prods[nt].iter().flat_map(|p| p.holes()).chain([nt]).collect();
        for d in deps {
            self.ensure(d, size.saturating_sub(1), budget, &mut |_, _| false)?;
        }
        Ok(())
    }

    fn build_level(
        &mut self,
        nt: usize,
        budget: &Budget,
        visit: &mut dyn FnMut(usize, &Entry) -> bool,
    ) -> Result<bool, Failure> {
        let s = self.levels[nt] + 1;
        self.banks[nt].push(Vec::new());
        let mut fresh: Vec<Entry> = Vec::new();
        let mut stop = false;
        let prune = self.prune;
        let mut level_seen: HashSet<Arc<[Value]>> = HashSet::new();
        self.candidates(nt, s, budget, &mut |this, e| {
            if prune {
                if this.seen[nt].contains(&e.vals) || level_seen.contains(&e.vals) {
                    return Ok(false);
                }
                level_seen.insert(e.vals.clone());
            }
            this.total += 1;
            if this.total > budget.max_bank {
                return Err(Failure::BankLimit);
            }
            stop = visit(nt, &e);
            fresh.push(e);
            Ok(stop)
        })?;
        self.seen[nt].extend(level_seen);
        if !fresh.is_empty() {
            self.last_nonempty = self.last_nonempty.max(s);
        }
        self.banks[nt][s] = fresh;
        self.levels[nt] = s;
        Ok(stop)
    }

    /// Every term of exactly `size` derivable from `nt` whose subterms come
    /// from the current banks, in enumeration order. Nothing is stored.
    pub fn candidates(
        &mut self,
        nt: usize,
        size: usize,
        budget: &Budget,
        f: &mut dyn FnMut(&mut Self, Entry) -> Result<bool, Failure>,
    ) -> Result<(), Failure> {
        let prods = self.prods[nt].clone();
        for p in prods {
            let holes = p.holes();
            let k = p.skeleton_size();
            if k + holes.len() > size || (holes.is_empty() && k != size) {
                continue;
            }
            let mut sizes = vec![0usize; holes.len()];
            if self.compositions(p, &holes, &mut sizes, 0, size - k, budget, f)? {
                return Ok(());
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn compositions(
        &mut self,
        p: &GTerm,
        holes: &[usize],
        sizes: &mut Vec<usize>,
        i: usize,
        left: usize,
        budget: &Budget,
        f: &mut dyn FnMut(&mut Self, Entry) -> Result<bool, Failure>,
    ) -> Result<bool, Failure> {
        if i == holes.len() {
            if left != 0 {
                return Ok(false);
            }
            let mut picked = Vec::with_capacity(holes.len());
            return self.products(p, holes, sizes, &mut picked, budget, f);
        }
        let rest = holes.len() - i - 1;
        for s in 1..=left.saturating_sub(rest) {
            if i + 1 == holes.len() && s != left {
                continue;
            }
            if self.bank(holes[i], s).is_empty() {
                continue;
            }
            sizes[i] = s;
            if self.compositions(p, holes, sizes, i + 1, left - s, budget, f)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn products(
        &mut self,
        p: &GTerm,
        holes: &[usize],
        sizes: &[usize],
        picked: &mut Vec<(usize, usize, usize)>,
        budget: &Budget,
        f: &mut dyn FnMut(&mut Self, Entry) -> Result<bool, Failure>,
    ) -> Result<bool, Failure> {
        let i = picked.len();
        if i == holes.len() {
            self.ticks += 1;
            if self.ticks % 2048 == 0 {
                budget.check()?;
            }
            let kids: Vec<&Entry> = picked.iter().map(|&(nt, s, j)| &self.banks[nt][s][j]).collect();
            let Some(e) = self.build(p, &kids) else { return Ok(false) };
            return f(self, e);
        }
        for j in 0..self.bank(holes[i], sizes[i]).len() {
            picked.push((holes[i], sizes[i], j));
            let stop = self.products(p, holes, sizes, picked, budget, f)?;
            picked.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn build(&self, p: &GTerm, kids: &[&Entry]) -> Option<Entry> {
        let funs = Defs::macros(self.macros);
        let mut vals = Vec::with_capacity(self.inputs.len());
        for j in 0..self.inputs.len() {
            let mut next = 0;
            vals.push(self.eval_template(p, kids, j, &mut next, &funs).ok()?);
        }
        let fillers: Vec<Term> = kids.iter().map(|k| k.term.clone()).collect();
        Some(Entry { term: p.instantiate(&fillers), vals: vals.into() })
    }

    fn eval_template(
        &self,
        p: &GTerm,
        kids: &[&Entry],
        j: usize,
        next: &mut usize,
        funs: &dyn FunEnv,
    ) -> Result<Value, EvalError> {
        match p {
            GTerm::Nt(_) => {
                let v = kids[*next].vals[j].clone();
                *next += 1;
                Ok(v)
            }
            GTerm::Leaf(t) => self.eval_leaf(t, j, funs),
            GTerm::App { func, args, .. } => {
                let vs = args.iter().map(|a| self.eval_template(a, kids, j, next, funs)).collect::<Result<Vec<_>, _>>()?;
                match func {
                    Func::Theory(op) => apply_op(*op, &vs),
                    Func::User(name) => funs.call(name, &vs, 0),
                }
            }
        }
    }

    fn eval_leaf(&self, t: &Term, j: usize, funs: &dyn FunEnv) -> Result<Value, EvalError> {
        match t.kind() {
            TermKind::Lit(v) => Ok(v.clone()),
            TermKind::Var(v) => match self.params.iter().position(|p| p == v) {
                Some(i) => Ok(self.inputs[j][i].clone()),
                None => Err(EvalError::UnboundVariable(v.clone())),
            },
            _ => {
                let vars: Vec<(Symbol, Value)> = self.params.iter().cloned().zip(self.inputs[j].iter().cloned()).collect();
                eval_with_vars(t, &vars, funs)
            }
        }
    }
}

/// Streaming view of an [`Enumerator`]: terms of one nonterminal in
/// enumeration order, growing levels on demand up to a size cap.
pub struct EnumState<'a> {
    pub enumerator: Enumerator<'a>,
    cursor: Vec<(usize, usize)>,
    max_size: usize,
    budget: Budget,
}

impl<'a> EnumState<'a> {
    pub fn new(enumerator: Enumerator<'a>, max_size: usize, budget: Budget) -> Self {
        let n = enumerator.grammar().len();
        EnumState { enumerator, cursor: vec![(1, 0); n], max_size, budget }
    }
}

/// Next term of `nt`, or `None` once the language (or the size cap) is used up.
pub fn enumerate_next(state: &mut EnumState, nt: usize) -> Result<Option<Term>, Failure> {
    loop {
        let (s, i) = state.cursor[nt];
        if s > state.max_size {
            return Ok(None);
        }
        if s > state.enumerator.size() {
            if state.enumerator.grow(&state.budget, |_, _| false)? == Grow::Exhausted {
                return Ok(None);
            }
            continue;
        }
        if let Some(e) = state.enumerator.bank(nt, s).get(i) {
            state.cursor[nt] = (s, i + 1);
            return Ok(Some(e.term.clone()));
        }
        state.cursor[nt] = (s + 1, 0);
    }
}
