use super::cegis::{drive, Consistency, Learner};
use super::enumerate::Enumerator;
use super::spec::{self, Analysis};
use super::{Budget, EngineConfig, Failure, Outcome};
use crate::ir::{FunSig, Func, GTerm, Grammar, Macro, Op, Problem, Solution, Sort, Symbol, Term, TermKind};
use crate::semantics::{eval_with_vars, Defs, Point, Value};

/// How a grammar lets the engine branch.
#[derive(Clone, Debug)]
pub(crate) enum Cond {
    /// `(ite B S S)`; predicates come from `B`.
    Ite { cond_nt: usize },
    /// A macro `(ite C(a) b c)` over three distinct parameters.
    Select { sig: FunSig, cond: usize, then: usize, els: usize, cond_nt: usize, test: Term, param: Symbol },
    /// A macro that returns its guard argument `a` when `C(a)` equals `when`
    /// and its other argument otherwise.
    Guard { sig: FunSig, guard: usize, rest: usize, test: Term, param: Symbol, when: bool },
}

fn reaches(g: &Grammar, from: usize, to: usize) -> bool {
    g.unit_closure(from).contains(&to)
}

fn holes_of(p: &GTerm) -> Option<Vec<usize>> {
    let GTerm::App { args, .. } = p else { return None };
    args.iter().map(|a| if let GTerm::Nt(i) = a { Some(*i) } else { None }).collect()
}

/// The branching construct available at the target's start symbol, if any.
pub(crate) fn conditional(problem: &Problem, target: usize) -> Option<Cond> {
    let g = problem.targets[target].grammar();
    let start = g.start();
    let prods: Vec<&GTerm> = g.unit_closure(start).into_iter().flat_map(|n| g.productions(n)).collect();
    for p in &prods {
        if let GTerm::App { func: Func::Theory(Op::Ite), .. } = p {
            if let Some(h) = holes_of(p) {
                if reaches(g, h[1], start) && reaches(g, h[2], start) {
                    return Some(Cond::Ite { cond_nt: h[0] });
                }
            }
        }
    }
    let mut guard = None;
    for p in &prods {
        let GTerm::App { func: Func::User(name), .. } = p else { continue };
        let (Some(h), Some(m)) = (holes_of(p), problem.macro_def(name)) else { continue };
        let Some((c, y, z)) = ite_shape(m) else { continue };
        let Some(k) = single_param(m, &c) else { continue };
        let param = m.params[k].0.clone();
        let ok = |i: usize| reaches(g, h[i], start);
        match (y, z) {
            (Some(j), Some(l)) if j != k && l != k && j != l && m.params.len() == 3 && ok(j) && ok(l) => {
                return Some(Cond::Select { sig: m.sig(), cond: k, then: j, els: l, cond_nt: h[k], test: c, param });
            }
            (Some(j), Some(l)) if m.params.len() == 2 && j != l && ok(j) && ok(l) && guard.is_none() => {
                let (rest, when) = if l == k { (j, false) } else { (l, true) };
                guard = Some(Cond::Guard { sig: m.sig(), guard: k, rest, test: c, param, when });
            }
            _ => {}
        }
    }
    guard
}

/// `(ite C y z)` with `y`, `z` parameter positions.
fn ite_shape(m: &Macro) -> Option<(Term, Option<usize>, Option<usize>)> {
    let TermKind::App(Func::Theory(Op::Ite), args) = m.body.kind() else { return None };
    let pos = |t: &Term| t.as_var().and_then(|v| m.params.iter().position(|p| &*p.0 == v));
    Some((args[0].clone(), pos(&args[1]), pos(&args[2])))
}

fn single_param(m: &Macro, c: &Term) -> Option<usize> {
    let fv = c.free_vars();
    if fv.len() != 1 {
        return None;
    }
    let v = fv.iter().next()?;
    m.params.iter().position(|p| &p.0 == v)
}

/// Operators that can combine Boolean predicates at the start symbol.
fn bool_op(g: &Grammar, op: Op, arity: usize) -> bool {
    let start = g.start();
    g.unit_closure(start).into_iter().flat_map(|n| g.productions(n)).any(|p| match p {
        GTerm::App { func: Func::Theory(o), .. } if *o == op => {
            holes_of(p).is_some_and(|h| h.len() == arity && h.iter().all(|&n| reaches(g, n, start)))
        }
        _ => false,
    })
}

pub(crate) fn applicable(problem: &Problem) -> bool {
    if problem.targets.len() != 1 {
        return false;
    }
    let a = Analysis::new(problem);
    let g = problem.targets[0].grammar();
    if problem.targets[0].ret == Sort::Bool {
        return a.fixed && bool_op(g, Op::And, 2) && bool_op(g, Op::Or, 2) && bool_op(g, Op::Not, 1);
    }
    a.single_invocation() && conditional(problem, 0).is_some()
}

pub(crate) fn run(problem: &Problem, cfg: &EngineConfig, budget: &Budget) -> Result<Outcome, Failure> {
    if !applicable(problem) {
        return Err(Failure::Unsupported("no branching construct the unification engine can use".into()));
    }
    let analysis = Analysis::new(problem);
    if problem.targets[0].ret == Sort::Bool {
        let mut l = IceLearner { problem, analysis, max_pred: cfg.max_pred_size };
        return drive(problem, cfg, budget, &mut l);
    }
    let cond = conditional(problem, 0).expect("checked by applicable");
    let mut l = UnifLearner { problem, analysis, cond, max_term: cfg.max_term_size, max_pred: cfg.max_pred_size };
    drive(problem, cfg, budget, &mut l)
}

/// Enumeration plus unification, refined by counterexamples.
pub fn unify_solve(problem: &Problem, cfg: &EngineConfig) -> Result<Outcome, Failure> {
    let budget = cfg.budget();
    let mut out = Outcome { solution: Solution::new(), verified: true, iterations: 0 };
    for part in spec::split(problem) {
        let o = run(&part, cfg, &budget)?;
        out.solution.extend(o.solution);
        out.verified &= o.verified;
        out.iterations += o.iterations;
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn union(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a |= b);
    }

    pub fn covers(&self, items: &[usize]) -> bool {
        items.iter().all(|&i| self.get(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tree {
    Leaf(usize),
    Node(usize, Box<Tree>, Box<Tree>),
}

fn entropy(labels: &[usize]) -> f64 {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &l in labels {
        match counts.iter_mut().find(|c| c.0 == l) {
            Some(c) => c.1 += 1,
            None => counts.push((l, 1)),
        }
    }
    let n = labels.len() as f64;
    counts.iter().map(|&(_, c)| -(c as f64 / n) * (c as f64 / n).log2()).sum()
}

/// ID3 over boolean features. `leaf` decides when a node needs no split;
/// `label` gives every item a class for the information-gain computation.
pub(crate) fn id3(
    items: &[usize],
    feats: &[Bits],
    leaf: &dyn Fn(&[usize]) -> Option<usize>,
    label: &dyn Fn(&[usize]) -> Vec<usize>,
    budget: &Budget,
) -> Result<Option<Tree>, Failure> {
    if let Some(l) = leaf(items) {
        return Ok(Some(Tree::Leaf(l)));
    }
    budget.check()?;
    let labels = label(items);
    let base = entropy(&labels);
    let mut best: Option<(f64, usize)> = None;
    for (f, bits) in feats.iter().enumerate() {
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for (k, &i) in items.iter().enumerate() {
            if bits.get(i) { yes.push(labels[k]) } else { no.push(labels[k]) }
        }
        if yes.is_empty() || no.is_empty() {
            continue;
        }
        let n = items.len() as f64;
        let gain = base - (yes.len() as f64 / n) * entropy(&yes) - (no.len() as f64 / n) * entropy(&no);
        if best.is_none_or(|(g, _)| gain > g + 1e-12) {
            best = Some((gain, f));
        }
    }
    let Some((_, f)) = best else { return Ok(None) };
    let (yes, no): (Vec<usize>, Vec<usize>) = items.iter().partition(|&&i| feats[f].get(i));
    let Some(t) = id3(&yes, feats, leaf, label, budget)? else { return Ok(None) };
    let Some(e) = id3(&no, feats, leaf, label, budget)? else { return Ok(None) };
    Ok(Some(Tree::Node(f, Box::new(t), Box::new(e))))
}

/// Greedy set cover: repeatedly the term covering most unlabeled items.
pub(crate) fn cover_labels(items: &[usize], covers: &[Bits]) -> Vec<usize> {
    let mut label = vec![usize::MAX; items.len()];
    let mut left = items.len();
    while left > 0 {
        let mut best = (0, usize::MAX);
        for (t, c) in covers.iter().enumerate() {
            let n = items.iter().zip(&label).filter(|(&i, &l)| l == usize::MAX && c.get(i)).count();
            if n > best.0 {
                best = (n, t);
            }
        }
        if best.0 == 0 {
            break;
        }
        for (k, &i) in items.iter().enumerate() {
            if label[k] == usize::MAX && covers[best.1].get(i) {
                label[k] = best.1;
                left -= 1;
            }
        }
    }
    label
}

fn test_holds(test: &Term, param: &Symbol, v: &Value, macros: &[Macro]) -> bool {
    eval_with_vars(test, &[(param.clone(), v.clone())], &Defs::macros(macros)).ok().and_then(|b| b.as_bool()).unwrap_or(false)
}

struct UnifLearner<'a> {
    problem: &'a Problem,
    analysis: Analysis,
    cond: Cond,
    max_term: usize,
    max_pred: usize,
}

impl Learner for UnifLearner<'_> {
    fn propose(&mut self, points: &[Point], budget: &Budget) -> Result<Solution, Failure> {
        let problem = self.problem;
        let cons = Consistency::new(problem, &self.analysis, points)?;
        let target = &problem.targets[0];
        let (inputs, _) = cons.inputs(0);
        let mut en = Enumerator::new(target.grammar(), &problem.macros, &target.params, inputs, true);
        let start = target.grammar().start();
        let n = points.len();
        let ids: Vec<usize> = (0..n).map(|k| cons.tables[0].per_point[k][0]).collect();
        let all: Vec<usize> = (0..n).collect();
        // distinct cover sets, smallest term first
        let mut terms: Vec<Term> = Vec::new();
        let mut covers: Vec<Bits> = Vec::new();
        let mut union = Bits::new(n);
        // every start term with its cover and guard sets (guard selectors only)
        let mut guards: Vec<(Term, Bits, Bits)> = Vec::new();
        let mut preds: Vec<Term> = Vec::new();
        let mut feats: Vec<Bits> = Vec::new();
        let mut pred_level = 0;
        for level in 1..=self.max_term {
            en.ensure(start, level, budget, &mut |_, _| false)?;
            for e in en.bank(start, level) {
                let mut c = Bits::new(n);
                for k in 0..n {
                    if cons.allowed(k, &e.vals[ids[k]]) {
                        c.set(k);
                    }
                }
                if c.covers(&all) {
                    return Ok(spec::single(problem, 0, e.term.clone()));
                }
                if let Cond::Guard { test, param, when, .. } = &self.cond {
                    let mut g = Bits::new(n);
                    for k in 0..n {
                        if test_holds(test, param, &e.vals[ids[k]], &problem.macros) == *when {
                            g.set(k);
                        }
                    }
                    guards.push((e.term.clone(), c.clone(), g));
                }
                if !c.is_zero() && !covers.contains(&c) {
                    union.union(&c);
                    terms.push(e.term.clone());
                    covers.push(c);
                }
            }
            if let Cond::Ite { cond_nt } | Cond::Select { cond_nt, .. } = &self.cond {
                let cond_nt = *cond_nt;
                while pred_level < level.min(self.max_pred) {
                    pred_level += 1;
                    en.ensure(cond_nt, pred_level, budget, &mut |_, _| false)?;
                    for e in en.bank(cond_nt, pred_level) {
                        let mut b = Bits::new(n);
                        for k in 0..n {
                            let on = match &self.cond {
                                Cond::Select { test, param, .. } => test_holds(test, param, &e.vals[ids[k]], &problem.macros),
                                _ => e.vals[ids[k]].as_bool() == Some(true),
                            };
                            if on {
                                b.set(k);
                            }
                        }
                        preds.push(e.term.clone());
                        feats.push(b);
                    }
                }
            }
            if !union.covers(&all) {
                continue;
            }
            let body = match &self.cond {
                Cond::Guard { sig, guard, rest, .. } => decision_list(&all, &terms, &covers, &guards)
                    .and_then(|(chain, last)| {
                        chain.into_iter().rev().try_fold(last, |acc, g| {
                            let mut args = vec![acc.clone(); 2];
                            args[*guard] = g;
                            args[*rest] = acc;
                            Term::call(sig, args).ok()
                        })
                    }),
                _ => {
                    let leaf = |items: &[usize]| covers.iter().position(|c| c.covers(items));
                    let label = |items: &[usize]| cover_labels(items, &covers);
                    id3(&all, &feats, &leaf, &label, budget)?.and_then(|t| self.flatten(&t, &terms, &preds))
                }
            };
            if let Some(body) = body {
                return Ok(spec::single(problem, 0, body));
            }
        }
        Err(Failure::SizeCap(self.max_term))
    }
}

/// A chain of guard terms plus the final fallback term. Each guard is taken
/// greedily as the one that settles the most remaining points, provided its
/// own value is acceptable wherever it is selected.
fn decision_list(
    all: &[usize],
    terms: &[Term],
    covers: &[Bits],
    guards: &[(Term, Bits, Bits)],
) -> Option<(Vec<Term>, Term)> {
    let mut left: Vec<usize> = all.to_vec();
    let mut chain = Vec::new();
    loop {
        if let Some(t) = covers.iter().position(|c| c.covers(&left)) {
            return Some((chain, terms[t].clone()));
        }
        let mut best: Option<(usize, usize)> = None;
        for (g, (_, cov, sel)) in guards.iter().enumerate() {
            let picked: Vec<usize> = left.iter().copied().filter(|&k| sel.get(k)).collect();
            if picked.is_empty() || best.is_some_and(|b| picked.len() <= b.0) || !cov.covers(&picked) {
                continue;
            }
            best = Some((picked.len(), g));
        }
        let (_, g) = best?;
        left.retain(|&k| !guards[g].2.get(k));
        chain.push(guards[g].0.clone());
    }
}

impl UnifLearner<'_> {
    fn flatten(&self, t: &Tree, terms: &[Term], preds: &[Term]) -> Option<Term> {
        match t {
            Tree::Leaf(i) => Some(terms[*i].clone()),
            Tree::Node(p, a, b) => {
                let (a, b) = (self.flatten(a, terms, preds)?, self.flatten(b, terms, preds)?);
                match &self.cond {
                    Cond::Ite { .. } => Term::ite(preds[*p].clone(), a, b).ok(),
                    Cond::Select { sig, cond, then, els, .. } => {
                        let mut args = vec![a.clone(); 3];
                        args[*cond] = preds[*p].clone();
                        args[*then] = a;
                        args[*els] = b;
                        Term::call(sig, args).ok()
                    }
                    Cond::Guard { .. } => None,
                }
            }
        }
    }
}

/// Learner for Boolean targets called at several argument tuples (loop
/// invariants and the like). Each point constrains the labels of its tuples;
/// labels are fixed by propagation, the rest follow a tree trained on the
/// forced ones, and a final tree over all labels becomes the candidate.
struct IceLearner<'a> {
    problem: &'a Problem,
    analysis: Analysis,
    max_pred: usize,
}

struct Clause {
    vars: Vec<usize>,
    allowed: Vec<u32>,
}

fn propagate(labels: &mut [Option<bool>], clauses: &[Clause]) -> bool {
    let mut changed = true;
    while changed {
        changed = false;
        for c in clauses {
            let ok: Vec<u32> = c
                .allowed
                .iter()
                .copied()
                .filter(|m| c.vars.iter().enumerate().all(|(i, &v)| labels[v].is_none_or(|b| b == (m >> i & 1 == 1))))
                .collect();
            let Some(&first) = ok.first() else { return false };
            for (i, &v) in c.vars.iter().enumerate() {
                let bit = first >> i & 1 == 1;
                if labels[v].is_none() && ok.iter().all(|m| (m >> i & 1 == 1) == bit) {
                    labels[v] = Some(bit);
                    changed = true;
                }
            }
        }
    }
    true
}

fn classify(t: &Tree, feats: &[Bits], item: usize) -> usize {
    match t {
        Tree::Leaf(l) => *l,
        Tree::Node(f, a, b) => classify(if feats[*f].get(item) { a } else { b }, feats, item),
    }
}

impl IceLearner<'_> {
    fn clauses(&self, cons: &Consistency, points: &[Point]) -> Result<Vec<Clause>, Failure> {
        let table = &cons.tables[0];
        let mut out = Vec::new();
        for (k, p) in points.iter().enumerate() {
            let mut vars = table.per_point[k].clone();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() > 16 {
                return Err(Failure::Unsupported("more than 16 invocations per point".into()));
            }
            let mut allowed = Vec::new();
            for mask in 0..1u32 << vars.len() {
                let lookup = |_: usize, args: &[Value]| {
                    let id = table.index.get(args)?;
                    let i = vars.iter().position(|v| v == id)?;
                    Some(Value::Bool(mask >> i & 1 == 1))
                };
                if self.analysis.holds(p, &self.problem.macros, &lookup).unwrap_or(false) {
                    allowed.push(mask);
                }
            }
            out.push(Clause { vars, allowed });
        }
        Ok(out)
    }

    fn flatten(&self, t: &Tree, preds: &[Term], consts: &[Option<Term>; 2]) -> Option<Term> {
        use Tree::Leaf;
        let and = |a: Term, b: Term| Term::app(Op::And, vec![a, b]).ok();
        let or = |a: Term, b: Term| Term::app(Op::Or, vec![a, b]).ok();
        let not = |a: Term| Term::app(Op::Not, vec![a]).ok();
        match t {
            Leaf(b) => consts[*b].clone(),
            Tree::Node(p, a, b) => {
                let p = preds[*p].clone();
                match (&**a, &**b) {
                    (Leaf(1), Leaf(0)) => Some(p),
                    (Leaf(0), Leaf(1)) => not(p),
                    (Leaf(1), e) => or(p, self.flatten(e, preds, consts)?),
                    (Leaf(0), e) => and(not(p)?, self.flatten(e, preds, consts)?),
                    (t, Leaf(1)) => or(not(p)?, self.flatten(t, preds, consts)?),
                    (t, Leaf(0)) => and(p, self.flatten(t, preds, consts)?),
                    (t, e) => or(
                        and(p.clone(), self.flatten(t, preds, consts)?)?,
                        and(not(p)?, self.flatten(e, preds, consts)?)?,
                    ),
                }
            }
        }
    }
}

impl Learner for IceLearner<'_> {
    fn propose(&mut self, points: &[Point], budget: &Budget) -> Result<Solution, Failure> {
        let problem = self.problem;
        let cons = Consistency::new(problem, &self.analysis, points)?;
        let clauses = self.clauses(&cons, points)?;
        let m = cons.tables[0].inputs.len();
        let mut forced = vec![None; m];
        if !propagate(&mut forced, &clauses) {
            return Err(Failure::Unrealizable);
        }
        let target = &problem.targets[0];
        let start = target.grammar().start();
        let mut en = Enumerator::new(target.grammar(), &problem.macros, &target.params, cons.tables[0].inputs.clone(), true);
        let mut preds: Vec<Term> = Vec::new();
        let mut feats: Vec<Bits> = Vec::new();
        let mut consts: [Option<Term>; 2] = [None, None];
        for level in 1..=self.max_pred {
            en.ensure(start, level, budget, &mut |_, _| false)?;
            for e in en.bank(start, level) {
                let mut b = Bits::new(m);
                for (i, v) in e.vals.iter().enumerate() {
                    if v.as_bool() == Some(true) {
                        b.set(i);
                    }
                }
                for (c, slot) in consts.iter_mut().enumerate() {
                    if slot.is_none() && e.vals.iter().all(|v| v.as_bool() == Some(c == 1)) {
                        *slot = Some(e.term.clone());
                    }
                }
                preds.push(e.term.clone());
                feats.push(b);
            }
            let known: Vec<usize> = (0..m).filter(|&i| forced[i].is_some()).collect();
            let pure = |labels: &[Option<bool>], items: &[usize]| -> Option<usize> {
                let first = items.first().map_or(Some(false), |&i| labels[i])?;
                items.iter().all(|&i| labels[i] == Some(first)).then_some(first as usize)
            };
            let as_class = |labels: &[Option<bool>], items: &[usize]| -> Vec<usize> {
                items.iter().map(|&i| labels[i].map_or(2, usize::from)).collect()
            };
            let prior = id3(&known, &feats, &|it| pure(&forced, it), &|it| as_class(&forced, it), budget)?;
            let mut labels = forced.clone();
            for i in 0..m {
                if labels[i].is_some() {
                    continue;
                }
                let pref = prior.as_ref().is_some_and(|t| classify(t, &feats, i) == 1);
                let mut trial = labels.clone();
                trial[i] = Some(pref);
                if !propagate(&mut trial, &clauses) {
                    trial = labels.clone();
                    trial[i] = Some(!pref);
                    if !propagate(&mut trial, &clauses) {
                        return Err(Failure::Unrealizable);
                    }
                }
                labels = trial;
            }
            let all: Vec<usize> = (0..m).collect();
            let Some(tree) = id3(&all, &feats, &|it| pure(&labels, it), &|it| as_class(&labels, it), budget)? else {
                continue;
            };
            if let Some(body) = self.flatten(&tree, &preds, &consts) {
                return Ok(spec::single(problem, 0, body));
            }
        }
        Err(Failure::SizeCap(self.max_pred))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn max2_by_unification() {
        let text = "(set-logic LIA)
(synth-fun max2 ((x Int) (y Int)) Int)
(declare-var x Int)
(declare-var y Int)
(constraint (>= (max2 x y) x))
(constraint (>= (max2 x y) y))
(constraint (or (= x (max2 x y)) (= y (max2 x y))))
(check-synth)";
        let p = parse(text).unwrap();
        assert!(applicable(&p));
        let o = unify_solve(&p, &cfg()).unwrap();
        let body = o.solution["max2"].body.to_string();
        assert!(body.starts_with("(ite "), "{body}");
        let funs = crate::semantics::NoFuns;
        for x in -5i64..=5 {
            for y in -5i64..=5 {
                let vars = [("x".into(), Value::int(x)), ("y".into(), Value::int(y))];
                let got = crate::semantics::eval_with_vars(&o.solution["max2"].body, &vars, &funs).unwrap();
                assert_eq!(got, Value::int(x.max(y)));
            }
        }
    }

    #[test]
    fn guard_selector_decision_list() {
        let text = "(set-logic LIA)
(define-fun qm ((a Int) (b Int)) Int (ite (< a 0) b a))
(synth-fun f ((x Int)) Int ((Start Int (x 0 1 7 (- Start Start) (+ Start Start) (qm Start Start)))))
(declare-var x Int)
(constraint (or (< x 0) (= (f x) (ite (= x 0) 7 (- x 1)))))
(check-synth)";
        let p = parse(text).unwrap();
        assert!(matches!(conditional(&p, 0), Some(Cond::Guard { guard: 0, rest: 1, when: false, .. })));
        let o = unify_solve(&p, &cfg()).unwrap();
        assert_eq!(o.solution["f"].body.to_string(), "(qm (- x 1) 7)");
    }

    #[test]
    fn selector_detection() {
        let text = "(set-logic BV)
(define-fun if0 ((c (_ BitVec 64)) (a (_ BitVec 64)) (b (_ BitVec 64))) (_ BitVec 64) (ite (= c #x0000000000000001) a b))
(synth-fun f ((x (_ BitVec 64))) (_ BitVec 64) ((Start (_ BitVec 64) (x #x0000000000000000 (if0 Start Start Start)))))
(constraint (= (f #x0000000000000001) #x0000000000000001))
(check-synth)";
        let p = parse(text).unwrap();
        assert!(matches!(conditional(&p, 0), Some(Cond::Select { cond: 0, then: 1, els: 2, .. })));
    }

    #[test]
    fn id3_splits_on_informative_feature() {
        let mut f0 = Bits::new(4);
        f0.set(0);
        let mut f1 = Bits::new(4);
        f1.set(0);
        f1.set(1);
        let labels = [0usize, 0, 1, 1];
        let t = id3(
            &[0, 1, 2, 3],
            &[f0, f1],
            &|it: &[usize]| {
                let l = labels[it[0]];
                it.iter().all(|&i| labels[i] == l).then_some(l)
            },
            &|it: &[usize]| it.iter().map(|&i| labels[i]).collect(),
            &Budget::unlimited(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(t, Tree::Node(1, Box::new(Tree::Leaf(0)), Box::new(Tree::Leaf(1))));
    }

    #[test]
    fn propagation_detects_conflicts() {
        let clauses = vec![
            Clause { vars: vec![0], allowed: vec![1] },
            Clause { vars: vec![0, 1], allowed: vec![0b00, 0b10, 0b11] },
        ];
        let mut labels = vec![None; 2];
        assert!(propagate(&mut labels, &clauses));
        assert_eq!(labels, [Some(true), Some(true)]);
        let mut bad = clauses;
        bad.push(Clause { vars: vec![1], allowed: vec![0] });
        assert!(!propagate(&mut vec![None; 2], &bad));
    }
}
