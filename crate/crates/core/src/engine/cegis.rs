use std::cell::RefCell;
use std::collections::HashMap;

use super::enumerate::{Entry, Enumerator, Grow};
use super::spec::{self, Analysis, InputTable};
use super::{Budget, EngineConfig, Failure, Outcome};
use crate::ir::{Problem, Solution, Term};
use crate::oracle::{verify, Verdict};
use crate::semantics::{eval_constraints, Point, Value};

/// Produces candidates consistent with a set of points.
pub(crate) trait Learner {
    fn propose(&mut self, points: &[Point], budget: &Budget) -> Result<Solution, Failure>;
}

/// The refinement loop: propose, verify, add the counterexample, repeat.
pub(crate) fn drive(
    problem: &Problem,
    cfg: &EngineConfig,
    budget: &Budget,
    learner: &mut dyn Learner,
) -> Result<Outcome, Failure> {
    let mut points: Vec<Point> = Vec::new();
    for it in 1..=cfg.max_iterations {
        budget.check()?;
        let solution = learner.propose(&points, budget)?;
        match verify(problem, &solution, &cfg.verify) {
            Verdict::Valid => return Ok(Outcome { solution, verified: true, iterations: it }),
            Verdict::Unknown(_) => return Ok(Outcome { solution, verified: false, iterations: it }),
            Verdict::Counterexample(p) => {
                if points.contains(&p) {
                    return Err(Failure::Internal("counterexample repeats a known point".into()));
                }
                points.push(p);
            }
            Verdict::NonConformant { target, .. } => {
                return Err(Failure::Internal(format!("candidate for `{target}` left its grammar")))
            }
        }
    }
    Err(Failure::Internal(format!("no convergence after {} iterations", cfg.max_iterations)))
}

pub(crate) fn run(problem: &Problem, cfg: &EngineConfig, budget: &Budget) -> Result<Outcome, Failure> {
    let mut learner = EnumLearner { problem, analysis: Analysis::new(problem), max_size: cfg.max_term_size };
    drive(problem, cfg, budget, &mut learner)
}

/// Counterexample-guided enumeration on every target of `problem`.
pub fn cegis_solve(problem: &Problem, cfg: &EngineConfig) -> Result<Outcome, Failure> {
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

/// Decides whether target values satisfy the constraints at every point.
pub(crate) struct Consistency<'a> {
    problem: &'a Problem,
    analysis: &'a Analysis,
    points: &'a [Point],
    pub tables: Vec<InputTable>,
    cache: RefCell<HashMap<(usize, Value), bool>>,
    cached: bool,
}

impl<'a> Consistency<'a> {
    pub fn new(problem: &'a Problem, analysis: &'a Analysis, points: &'a [Point]) -> Result<Self, Failure> {
        let tables = if analysis.fixed {
            (0..analysis.targets.len())
                .map(|i| InputTable::build(analysis, i, points, &problem.macros))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Internal(format!("invocation arguments: {e}")))?
        } else {
            Vec::new()
        };
        let cached = analysis.single_invocation() && analysis.targets.len() == 1;
        Ok(Consistency { problem, analysis, points, tables, cache: RefCell::new(HashMap::new()), cached })
    }

    /// Inputs the enumerator for target `i` should evaluate on, and whether
    /// pruning by those values is sound.
    pub fn inputs(&self, i: usize) -> (Vec<Vec<Value>>, bool) {
        if self.analysis.fixed {
            (self.tables[i].inputs.clone(), true)
        } else {
            let t = &self.problem.targets[i];
            (vec![t.params.iter().map(|p| Value::default_for(p.1)).collect()], false)
        }
    }

    /// Whether one target value is acceptable at point `k` (single-invocation,
    /// single-target problems only).
    pub fn allowed(&self, k: usize, v: &Value) -> bool {
        if let Some(&r) = self.cache.borrow().get(&(k, v.clone())) {
            return r;
        }
        let r = self.analysis.holds(&self.points[k], &self.problem.macros, &|_, _| Some(v.clone())).unwrap_or(false);
        self.cache.borrow_mut().insert((k, v.clone()), r);
        r
    }

    pub fn point_ok(&self, k: usize, vals: &[&[Value]], terms: &[&Term]) -> bool {
        if !self.analysis.fixed {
            let sol: Solution =
                terms.iter().enumerate().map(|(i, t)| spec::single(self.problem, i, (*t).clone())).flatten().collect();
            return eval_constraints(self.problem, &sol, &self.points[k]).unwrap_or(false);
        }
        if self.cached {
            let Some(&j) = self.tables[0].per_point[k].first() else {
                return self.analysis.holds(&self.points[k], &self.problem.macros, &|_, _| None).unwrap_or(false);
            };
            return self.allowed(k, &vals[0][j]);
        }
        let lookup = |i: usize, args: &[Value]| self.tables[i].index.get(args).map(|&j| vals[i][j].clone());
        self.analysis.holds(&self.points[k], &self.problem.macros, &lookup).unwrap_or(false)
    }

    pub fn all_ok(&self, vals: &[&[Value]], terms: &[&Term]) -> bool {
        (0..self.points.len()).rev().all(|k| self.point_ok(k, vals, terms))
    }
}

struct EnumLearner<'a> {
    problem: &'a Problem,
    analysis: Analysis,
    max_size: usize,
}

impl Learner for EnumLearner<'_> {
    fn propose(&mut self, points: &[Point], budget: &Budget) -> Result<Solution, Failure> {
        let cons = Consistency::new(self.problem, &self.analysis, points)?;
        let mut enums: Vec<Enumerator> = self
            .problem
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (inputs, prune) = cons.inputs(i);
                Enumerator::new(t.grammar(), &self.problem.macros, &t.params, inputs, prune)
            })
            .collect();
        if enums.len() == 1 {
            return single(self.problem, &cons, &mut enums[0], self.max_size, budget);
        }
        product(self.problem, &cons, &mut enums, self.max_size, budget)
    }
}

fn single(
    problem: &Problem,
    cons: &Consistency,
    e: &mut Enumerator,
    max_size: usize,
    budget: &Budget,
) -> Result<Solution, Failure> {
    let start = e.grammar().start();
    let mut found: Option<Term> = None;
    loop {
        if e.size() >= max_size {
            return Err(Failure::SizeCap(max_size));
        }
        let r = e.grow(budget, |nt, entry: &Entry| {
            if nt == start && cons.all_ok(&[&entry.vals], &[&entry.term]) {
                found = Some(entry.term.clone());
                return true;
            }
            false
        })?;
        if let Some(t) = found {
            return Ok(spec::single(problem, 0, t));
        }
        if r == Grow::Exhausted {
            return Err(Failure::GrammarExhausted);
        }
    }
}

/// Joint search over several targets, ordered by the sum of term sizes.
fn product(
    problem: &Problem,
    cons: &Consistency,
    enums: &mut [Enumerator],
    max_size: usize,
    budget: &Budget,
) -> Result<Solution, Failure> {
    let n = enums.len();
    for total in n..=n * max_size {
        for e in enums.iter_mut() {
            while e.size() < (total - n + 1).min(max_size) && !e.is_exhausted() {
                e.grow(budget, |_, _| false)?;
            }
        }
        let mut sizes = vec![0; n];
        if let Some(terms) = split_sizes(cons, enums, &mut sizes, 0, total, budget)? {
            return Ok(terms.into_iter().enumerate().flat_map(|(i, t)| spec::single(problem, i, t)).collect());
        }
        let all_done = enums.iter().all(|e| e.is_exhausted() && total >= n * e.size());
        if all_done {
            return Err(Failure::GrammarExhausted);
        }
    }
    Err(Failure::SizeCap(max_size))
}

fn split_sizes(
    cons: &Consistency,
    enums: &[Enumerator],
    sizes: &mut Vec<usize>,
    i: usize,
    left: usize,
    budget: &Budget,
) -> Result<Option<Vec<Term>>, Failure> {
    let n = enums.len();
    if i == n {
        if left != 0 {
            return Ok(None);
        }
        let mut picked = Vec::new();
        return pick(cons, enums, sizes, &mut picked, budget);
    }
    for s in 1..=left.saturating_sub(n - i - 1) {
        if s > enums[i].size() || (i + 1 == n && s != left) {
            continue;
        }
        sizes[i] = s;
        if let Some(t) = split_sizes(cons, enums, sizes, i + 1, left - s, budget)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn pick<'e>(
    cons: &Consistency,
    enums: &'e [Enumerator],
    sizes: &[usize],
    picked: &mut Vec<&'e Entry>,
    budget: &Budget,
) -> Result<Option<Vec<Term>>, Failure> {
    let i = picked.len();
    if i == enums.len() {
        let vals: Vec<&[Value]> = picked.iter().map(|e| &*e.vals).collect();
        let terms: Vec<&Term> = picked.iter().map(|e| &e.term).collect();
        return Ok(cons.all_ok(&vals, &terms).then(|| terms.into_iter().cloned().collect()));
    }
    budget.check()?;
    let e = &enums[i];
    for entry in e.bank(e.grammar().start(), sizes[i]) {
        picked.push(entry);
        let r = pick(cons, enums, sizes, picked, budget)?;
        picked.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    const QM_INNER: &str = "(set-logic LIA)
(define-fun qm ((a Int) (b Int)) Int (ite (< a 0) b a))
(synth-fun qm-inner-loop ((x Int)) Int
  ((Start Int (x 0 1 7 (- Start Start) (+ Start Start) (qm Start Start)))))
(declare-var x Int)
(constraint (or (< x 0) (= (qm-inner-loop x) (ite (= x 0) 7 (- x 1)))))
(check-synth)";

    #[test]
    fn qm_inner_loop() {
        let p = parse(QM_INNER).unwrap();
        let o = cegis_solve(&p, &EngineConfig::default()).unwrap();
        let body = &o.solution["qm-inner-loop"].body;
        assert_eq!(body.size(), 5);
        assert_eq!(body.to_string(), "(qm (- x 1) 7)");
    }

    #[test]
    fn unsatisfiable_exhausts_finite_grammar() {
        let text = "(set-logic LIA)
(synth-fun f ((x Int)) Int ((Start Int (0 1))))
(declare-var x Int)
(constraint (= (f x) 2))
(check-synth)";
        let p = parse(text).unwrap();
        assert_eq!(cegis_solve(&p, &EngineConfig::default()), Err(Failure::GrammarExhausted));
    }

    #[test]
    fn two_linked_targets() {
        let text = "(set-logic LIA)
(synth-fun f ((x Int)) Int ((Start Int (x 0 1 (+ Start Start)))))
(synth-fun g ((x Int)) Int ((Start Int (x 0 1 (+ Start Start)))))
(declare-var x Int)
(constraint (= (+ (f x) (g x)) (+ x (+ x 1))))
(check-synth)";
        let p = parse(text).unwrap();
        let o = cegis_solve(&p, &EngineConfig::default()).unwrap();
        assert_eq!(verify(&p, &o.solution, &Default::default()), Verdict::Unknown("unverified beyond bound".into()));
        let total: usize = o.solution.values().map(|d| d.body.size()).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn nested_invocations_fall_back_to_full_evaluation() {
        let text = "(set-logic LIA)
(synth-fun f ((x Int)) Int)
(declare-var x Int)
(constraint (= (f (f x)) (+ x 2)))
(check-synth)";
        let p = parse(text).unwrap();
        let o = cegis_solve(&p, &EngineConfig::default()).unwrap();
        assert_eq!(o.solution["f"].body.to_string(), "(+ x 1)");
    }
}
