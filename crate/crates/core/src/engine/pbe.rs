use std::collections::HashMap;
use std::sync::Arc;

use super::enumerate::Enumerator;
use super::spec;
use super::unify::{conditional, cover_labels, id3, Bits, Cond, Tree};
use super::{Budget, EngineConfig, Failure, Outcome};
use crate::ir::{inline_lets, Func, GTerm, Grammar, Op, Problem, Sort, Term, TermKind};
use crate::oracle::{verify, Verdict};
use crate::semantics::{eval_with_vars, Defs, NoFuns, Value};

/// Input/output pairs of a programming-by-example problem, duplicates removed,
/// in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Examples {
    pub inputs: Vec<Vec<Value>>,
    pub outputs: Vec<Value>,
}

fn closed(t: &Term, problem: &Problem) -> Option<Value> {
    if !t.free_vars().is_empty() || problem.target_names().iter().any(|n| t.mentions_fun(n)) {
        return None;
    }
    eval_with_vars(t, &[], &Defs::macros(&problem.macros)).ok()
}

/// `Some` when every constraint has the form `(= (f c...) c)` with closed
/// arguments and output, for a single target `f`.
pub fn extract_pbe_points(problem: &Problem) -> Result<Option<Examples>, Failure> {
    if problem.targets.len() != 1 || problem.constraints.is_empty() {
        return Ok(None);
    }
    let name = &problem.targets[0].name;
    let mut ex = Examples { inputs: Vec::new(), outputs: Vec::new() };
    let mut seen: HashMap<Vec<Value>, usize> = HashMap::new();
    for c in &problem.constraints {
        let c = inline_lets(c);
        let TermKind::App(Func::Theory(Op::Eq), sides) = c.kind() else { return Ok(None) };
        let [l, r] = sides.as_slice() else { return Ok(None) };
        let call = |t: &Term| match t.kind() {
            TermKind::App(Func::User(f), args) if f == name => Some(args.clone()),
            _ => None,
        };
        let (args, out) = match (call(l), call(r)) {
            (Some(a), None) => (a, r),
            (None, Some(a)) => (a, l),
            _ => return Ok(None),
        };
        let Some(input) = args.iter().map(|a| closed(a, problem)).collect::<Option<Vec<_>>>() else { return Ok(None) };
        let Some(out) = closed(out, problem) else { return Ok(None) };
        match seen.get(&input) {
            Some(&i) if ex.outputs[i] == out => {}
            Some(_) => return Err(Failure::ConflictingExamples),
            None => {
                seen.insert(input.clone(), ex.inputs.len());
                ex.inputs.push(input);
                ex.outputs.push(out);
            }
        }
    }
    Ok(Some(ex))
}

pub(crate) fn run(problem: &Problem, ex: &Examples, cfg: &EngineConfig, budget: &Budget) -> Result<Outcome, Failure> {
    let body = search(problem, ex, cfg, budget)?;
    let solution = spec::single(problem, 0, body);
    match verify(problem, &solution, &cfg.verify) {
        Verdict::Valid => Ok(Outcome { solution, verified: true, iterations: 1 }),
        Verdict::Unknown(_) => Ok(Outcome { solution, verified: false, iterations: 1 }),
        other => Err(Failure::Internal(format!("example-consistent program rejected: {other:?}"))),
    }
}

/// Example-driven synthesis: direct enumeration, then concatenation splitting
/// for strings, then unification when the grammar can branch.
pub fn pbe_solve(problem: &Problem, cfg: &EngineConfig) -> Result<Outcome, Failure> {
    let ex = extract_pbe_points(problem)?.ok_or_else(|| Failure::Unsupported("not a PBE problem".into()))?;
    run(problem, &ex, cfg, &cfg.budget())
}

fn search(problem: &Problem, ex: &Examples, cfg: &EngineConfig, budget: &Budget) -> Result<Term, Failure> {
    let target = &problem.targets[0];
    let g = target.grammar();
    let start = g.start();
    let mut en = Enumerator::new(g, &problem.macros, &target.params, ex.inputs.clone(), true);
    let goal: Arc<[Value]> = ex.outputs.clone().into();
    let concat = concat_splits(g);
    let strings = target.ret == Sort::String && concat.iter().any(|c| !c.is_empty());
    let cond = conditional(problem, 0).filter(|c| !matches!(c, Cond::Guard { .. }));
    let mut pred_level = 0;
    let mut preds: Vec<(Term, Bits)> = Vec::new();
    for level in 1..=cfg.max_term_size {
        let mut found = None;
        en.ensure(start, level, budget, &mut |nt, e| {
            if nt == start && e.vals == goal {
                found = Some(e.term.clone());
            }
            found.is_some()
        })?;
        if let Some(t) = found {
            return Ok(t);
        }
        if strings {
            let mut d = Decomposer { en: &en, splits: &concat, memo: HashMap::new(), calls: 0, budget };
            let goal: Vec<Arc<str>> = ex.outputs.iter().filter_map(|v| v.as_str().map(Arc::from)).collect();
            if let Some(t) = d.solve(start, goal)? {
                return Ok(t);
            }
        }
        if let Some(c) = &cond {
            let cond_nt = match c {
                Cond::Ite { cond_nt } | Cond::Select { cond_nt, .. } => *cond_nt,
                Cond::Guard { .. } => unreachable!("filtered above"),
            };
            while pred_level < level.min(cfg.max_pred_size) {
                pred_level += 1;
                en.ensure(cond_nt, pred_level, budget, &mut |_, _| false)?;
                for e in en.bank(cond_nt, pred_level) {
                    let mut b = Bits::new(goal.len());
                    for (i, v) in e.vals.iter().enumerate() {
                        let on = match c {
                            Cond::Select { test, param, .. } => eval_with_vars(test, &[(param.clone(), v.clone())], &NoFuns)
                                .ok()
                                .and_then(|b| b.as_bool())
                                .unwrap_or(false),
                            _ => v.as_bool() == Some(true),
                        };
                        if on {
                            b.set(i);
                        }
                    }
                    preds.push((e.term.clone(), b));
                }
            }
            if let Some(t) = unify(&en, start, &goal, c, &preds, budget)? {
                return Ok(t);
            }
        }
    }
    Err(Failure::SizeCap(cfg.max_term_size))
}

fn unify(
    en: &Enumerator,
    start: usize,
    goal: &[Value],
    cond: &Cond,
    preds: &[(Term, Bits)],
    budget: &Budget,
) -> Result<Option<Term>, Failure> {
    let n = goal.len();
    let mut terms: Vec<Term> = Vec::new();
    let mut covers: Vec<Bits> = Vec::new();
    let mut union = Bits::new(n);
    for e in en.entries(start) {
        let mut c = Bits::new(n);
        for i in 0..n {
            if e.vals[i] == goal[i] {
                c.set(i);
            }
        }
        if !c.is_zero() && !covers.contains(&c) {
            union.union(&c);
            terms.push(e.term.clone());
            covers.push(c);
        }
    }
    let all: Vec<usize> = (0..n).collect();
    if !union.covers(&all) {
        return Ok(None);
    }
    let feats: Vec<Bits> = preds.iter().map(|p| p.1.clone()).collect();
    let leaf = |items: &[usize]| covers.iter().position(|c| c.covers(items));
    let label = |items: &[usize]| cover_labels(items, &covers);
    let Some(tree) = id3(&all, &feats, &leaf, &label, budget)? else { return Ok(None) };
    Ok(flatten(&tree, &terms, preds, cond))
}

fn flatten(t: &Tree, terms: &[Term], preds: &[(Term, Bits)], cond: &Cond) -> Option<Term> {
    match t {
        Tree::Leaf(i) => Some(terms[*i].clone()),
        Tree::Node(p, a, b) => {
            let (a, b) = (flatten(a, terms, preds, cond)?, flatten(b, terms, preds, cond)?);
            let p = preds[*p].0.clone();
            match cond {
                Cond::Ite { .. } => Term::ite(p, a, b).ok(),
                Cond::Select { sig, cond, then, els, .. } => {
                    let mut args = vec![p.clone(); 3];
                    args[*cond] = p;
                    args[*then] = a;
                    args[*els] = b;
                    Term::call(sig, args).ok()
                }
                Cond::Guard { .. } => None,
            }
        }
    }
}

/// For each nonterminal, the `(str.++ A B)` productions reachable through unit
/// productions, as `(A, B)`.
fn concat_splits(g: &Grammar) -> Vec<Vec<(usize, usize)>> {
    (0..g.len())
        .map(|nt| {
            g.unit_closure(nt)
                .into_iter()
                .flat_map(|n| g.productions(n))
                .filter_map(|p| match p {
                    GTerm::App { func: Func::Theory(Op::StrConcat), args, .. } => match args.as_slice() {
                        [GTerm::Nt(a), GTerm::Nt(b)] => Some((*a, *b)),
                        _ => None,
                    },
                    _ => None,
                })
                .collect()
        })
        .collect()
}

const MAX_SPLIT_CALLS: usize = 50_000;

/// Splits string outputs into an enumerated prefix and a recursively solved
/// remainder.
struct Decomposer<'a, 'e> {
    en: &'a Enumerator<'e>,
    splits: &'a [Vec<(usize, usize)>],
    memo: HashMap<(usize, Vec<Arc<str>>), Option<Term>>,
    calls: usize,
    budget: &'a Budget,
}

impl Decomposer<'_, '_> {
    fn solve(&mut self, nt: usize, goal: Vec<Arc<str>>) -> Result<Option<Term>, Failure> {
        let key = (nt, goal);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.calls += 1;
        if self.calls > MAX_SPLIT_CALLS {
            return Ok(None);
        }
        if self.calls % 256 == 0 {
            self.budget.check()?;
        }
        let (nt, goal) = key;
        let vals: Vec<Value> = goal.iter().map(|s| Value::Str(s.clone())).collect();
        let exact = self.en.entries(nt).find(|e| *e.vals == *vals).map(|e| e.term.clone());
        let mut result = exact;
        if result.is_none() && goal.iter().any(|s| !s.is_empty()) {
            'outer: for &(a, b) in &self.splits[nt] {
                for e in self.en.entries(a) {
                    let mut rest = Vec::with_capacity(goal.len());
                    let mut progress = false;
                    for (v, s) in e.vals.iter().zip(&goal) {
                        match v.as_str() {
                            Some(p) if s.starts_with(p) => {
                                progress |= !p.is_empty();
                                rest.push(Arc::from(&s[p.len()..]));
                            }
                            _ => break,
                        }
                    }
                    if rest.len() != goal.len() || !progress {
                        continue;
                    }
                    if let Some(r) = self.solve(b, rest)? {
                        result = Term::app(Op::StrConcat, vec![e.term.clone(), r]).ok();
                        break 'outer;
                    }
                }
            }
        }
        self.memo.insert((nt, goal), result.clone());
        Ok(result)
    }
}
