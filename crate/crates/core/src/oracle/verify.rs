use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{external_check, Verdict, VerifyConfig};
use crate::ir::{substitute_targets, Op, Problem, Solution, Sort, Symbol, Term};
use crate::semantics::{eval_constraints, eval_in, truth, BitVec, Defs, EvalError, Point, Value};

/// The conjunction of all constraints with the targets substituted, ready
/// for repeated evaluation.
pub(crate) struct Checker<'a> {
    problem: &'a Problem,
    formula: Term,
    /// Universals the formula actually depends on.
    pub(crate) free: Vec<(Symbol, Sort)>,
}

impl<'a> Checker<'a> {
    pub(crate) fn new(problem: &'a Problem, solution: &Solution) -> Result<Self, String> {
        let targets = problem.target_names();
        let parts = problem
            .constraints
            .iter()
            .map(|c| substitute_targets(c, solution, &targets))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let formula = match parts.len() {
            0 => Term::bool(true),
            1 => parts.into_iter().next().expect("one part"),
            _ => Term::app(Op::And, parts).expect("Boolean constraints"),
        };
        let used = formula.free_vars();
        let free = problem.universals.iter().filter(|(n, _)| used.contains(n)).cloned().collect();
        Ok(Checker { problem, formula, free })
    }

    pub(crate) fn holds(&self, p: &Point) -> Result<bool, EvalError> {
        truth(&eval_in(&self.formula, p, &Defs::macros(&self.problem.macros))?)
    }

    /// A point assigning every universal, defaults where `partial` is silent.
    pub(crate) fn complete(&self, partial: Point) -> Point {
        let mut p = partial;
        for (n, s) in &self.problem.universals {
            p.entry(n.clone()).or_insert_with(|| Value::default_for(*s));
        }
        p
    }
}

/// Index of the first constraint violated at `p`.
pub fn first_violated(problem: &Problem, solution: &Solution, p: &Point) -> Result<Option<usize>, EvalError> {
    let defs = Defs::with_solution(&problem.macros, solution);
    for (i, c) in problem.constraints.iter().enumerate() {
        if !truth(&eval_in(c, p, &defs)?)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Confirms a counterexample through the independent evaluation path.
pub(crate) fn confirmed(problem: &Problem, solution: &Solution, p: Point) -> Verdict {
    let falsified = eval_constraints(problem, solution, &p);
    assert_eq!(falsified, Ok(false), "counterexample {p:?} does not falsify the problem");
    Verdict::Counterexample(p)
}

/// Candidate values for one variable.
struct Pools {
    ints: Vec<BigInt>,
    strings: Vec<Arc<str>>,
    bvs: Vec<u64>,
}

impl Pools {
    fn new(problem: &Problem) -> Self {
        let mut ints = BTreeSet::new();
        let mut strings = BTreeSet::new();
        let mut bvs = BTreeSet::new();
        let mut lits: Vec<Value> = Vec::new();
        for t in problem.constraints.iter().chain(problem.macros.iter().map(|m| &m.body)) {
            lits.extend(t.literals());
        }
        for t in &problem.targets {
            let g = t.grammar();
            let mut leaves = Vec::new();
            (0..g.len()).flat_map(|i| g.productions(i)).for_each(|p| collect_leaves(p, &mut leaves));
            lits.extend(leaves.iter().flat_map(Term::literals));
        }
        for v in lits {
            match v {
                Value::Int(n) => {
                    ints.insert(&n - 1);
                    ints.insert(&n + 1);
                    ints.insert(n);
                }
                Value::Str(s) => {
                    strings.insert(s);
                }
                Value::BitVec(b) => {
                    bvs.insert(b.bits());
                }
                Value::Bool(_) => {}
            }
        }
        let mut pool: Vec<Arc<str>> = vec![Arc::from("")];
        pool.extend(strings.iter().cloned());
        let mut subs = BTreeSet::new();
        for s in &strings {
            let cs: Vec<char> = s.chars().collect();
            for i in 0..cs.len().min(12) {
                for j in i + 1..=cs.len().min(i + 6) {
                    subs.insert(cs[i..j].iter().collect::<String>());
                }
            }
        }
        pool.extend(subs.into_iter().map(Arc::from).filter(|s: &Arc<str>| !strings.contains(s)));
        Pools { ints: ints.into_iter().collect(), strings: pool, bvs: bvs.into_iter().collect() }
    }

    /// The structured bitvector set: 0, 1, powers of two, their predecessors
    /// and all-ones, plus the benchmark's constants.
    fn bv_structured(&self, w: u32) -> Vec<u64> {
        let mask = BitVec::mask(w);
        let mut out = vec![0, 1, mask];
        for i in 1..w {
            out.push(1u64 << i);
            out.push((1u64 << i) - 1);
        }
        out.extend(self.bvs.iter().map(|b| b & mask));
        let mut seen = BTreeSet::new();
        out.retain(|b| seen.insert(*b));
        out
    }

    fn grid_domain(&self, sort: Sort, int_radius: i64) -> Vec<Value> {
        match sort {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int => (-int_radius..=int_radius).map(Value::int).collect(),
            Sort::BitVec(w) => self.bv_structured(w).into_iter().map(|b| Value::bv(w, b)).collect(),
            Sort::String => self.strings.iter().map(|s| Value::Str(s.clone())).collect(),
        }
    }

    fn sample(&self, sort: Sort, bound: i64, drawn: &[Value], rng: &mut ChaCha8Rng) -> Value {
        match sort {
            Sort::Bool => Value::Bool(rng.gen()),
            Sort::Int => {
                let earlier: Vec<&BigInt> = drawn.iter().filter_map(Value::as_int).collect();
                match rng.gen_range(0..10) {
                    0..=3 => Value::int(rng.gen_range(-bound..=bound)),
                    4 | 5 => Value::int(rng.gen_range(-1_000_000..=1_000_000)),
                    6 | 7 if !self.ints.is_empty() => Value::Int(self.ints[rng.gen_range(0..self.ints.len())].clone()),
                    _ if !earlier.is_empty() => {
                        let base = earlier[rng.gen_range(0..earlier.len())];
                        Value::Int(base + rng.gen_range(-2..=2))
                    }
                    _ => Value::int(rng.gen_range(-bound..=bound)),
                }
            }
            Sort::BitVec(w) => {
                if rng.gen_bool(0.5) {
                    let s = self.bv_structured(w);
                    Value::bv(w, s[rng.gen_range(0..s.len())])
                } else {
                    Value::bv(w, rng.gen())
                }
            }
            Sort::String => match rng.gen_range(0..10) {
                0..=2 => Value::Str(self.strings[rng.gen_range(0..self.strings.len())].clone()),
                3..=5 => {
                    let a = &self.strings[rng.gen_range(0..self.strings.len())];
                    let b = &self.strings[rng.gen_range(0..self.strings.len())];
                    Value::str(&format!("{a}{b}"))
                }
                _ => {
                    let n = rng.gen_range(0..=10);
                    Value::str(&(0..n).map(|_| rng.gen_range(' '..='~')).collect::<String>())
                }
            },
        }
    }
}

fn collect_leaves(p: &crate::ir::GTerm, out: &mut Vec<Term>) {
    match p {
        crate::ir::GTerm::Nt(_) => {}
        crate::ir::GTerm::Leaf(t) => out.push(t.clone()),
        crate::ir::GTerm::App { args, .. } => args.iter().for_each(|a| collect_leaves(a, out)),
    }
}

/// Tiers 1 and 2: a closed formula is evaluated once; otherwise a bounded
/// grid, then seeded random samples.
pub(crate) fn search(checker: &Checker, cfg: &VerifyConfig) -> Result<Option<Point>, EvalError> {
    let problem = checker.problem;
    if checker.free.is_empty() {
        let p = checker.complete(Point::new());
        return Ok((!checker.holds(&p)?).then_some(p));
    }
    let pools = Pools::new(problem);
    let n_int = checker.free.iter().filter(|v| v.1 == Sort::Int).count() as u32;
    let others: Vec<usize> = checker
        .free
        .iter()
        .filter(|v| v.1 != Sort::Int)
        .map(|v| pools.grid_domain(v.1, 0).len())
        .collect();
    let other_product = others.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    let mut radius = cfg.int_bound;
    let fits = |r: i64| {
        let side = (2 * r + 1) as usize;
        other_product
            .and_then(|o| side.checked_pow(n_int).and_then(|s| s.checked_mul(o)))
            .is_some_and(|total| total <= cfg.grid_cap)
    };
    while radius > 0 && !fits(radius) {
        radius /= 2;
    }
    if fits(radius) {
        let domains: Vec<Vec<Value>> = checker.free.iter().map(|v| pools.grid_domain(v.1, radius)).collect();
        if let Some(p) = grid_search(checker, &domains)? {
            return Ok(Some(p));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples {
        let mut drawn = Vec::with_capacity(checker.free.len());
        for (_, s) in &checker.free {
            let v = pools.sample(*s, cfg.int_bound, &drawn, &mut rng);
            drawn.push(v);
        }
        let p = checker.complete(checker.free.iter().map(|v| v.0.clone()).zip(drawn).collect());
        if !checker.holds(&p)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn grid_search(checker: &Checker, domains: &[Vec<Value>]) -> Result<Option<Point>, EvalError> {
    if domains.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut idx = vec![0usize; domains.len()];
    let mut p = checker.complete(Point::new());
    loop {
        for (k, (n, _)) in checker.free.iter().enumerate() {
            p.insert(n.clone(), domains[k][idx[k]].clone());
        }
        if !checker.holds(&p)? {
            return Ok(Some(p));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(None);
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Semantic verification in three tiers: exact evaluation of closed
/// (example-only) problems, bounded search, then the external solver.
pub fn verify(problem: &Problem, solution: &Solution, cfg: &VerifyConfig) -> Verdict {
    let checker = match Checker::new(problem, solution) {
        Ok(c) => c,
        Err(e) => return Verdict::Unknown(e),
    };
    match search(&checker, cfg) {
        Ok(Some(p)) => return confirmed(problem, solution, p),
        Ok(None) if checker.free.is_empty() => return Verdict::Valid,
        Ok(None) => {}
        Err(e) => return Verdict::Unknown(format!("evaluation failed: {e}")),
    }
    match &cfg.smt {
        Some(smt) => external_check(problem, solution, smt),
        None => Verdict::Unknown("unverified beyond bound".into()),
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::frontend::{parse, parse_solution};
    use crate::oracle::SmtConfig;

    const ABS: &str = "(set-logic LIA)
(synth-fun abs ((x Int)) Int)
(declare-var x Int)
(constraint (>= (abs x) 0))
(constraint (or (= x (abs x)) (= (- x) (abs x))))
(check-synth)";

    const INITIALS: &str = "(set-logic SLIA)
(synth-fun f ((name String)) String
  ((Start String (ntString))
   (ntString String (name \" \" \".\" (str.++ ntString ntString) (str.at ntString ntInt)))
   (ntInt Int (0 1 (+ ntInt ntInt) (str.indexof ntString ntString ntInt)))))
(declare-var name String)
(constraint (= (f \"Nancy FreeHafer\") \"N.F.\"))
(constraint (= (f \"Andrew Cencici\") \"A.C.\"))
(constraint (= (f \"Jan Kotas\") \"J.K.\"))
(constraint (= (f \"Mariya Sergienko\") \"M.S.\"))
(check-synth)";

    fn z3() -> Option<SmtConfig> {
        let ok = std::process::Command::new("z3").arg("-version").output().is_ok();
        ok.then(|| SmtConfig::from_command("z3 -in", Duration::from_secs(10)).unwrap())
    }

    #[test]
    fn abs_identity_has_a_negative_counterexample() {
        let p = parse(ABS).unwrap();
        let sol = parse_solution("(define-fun abs ((x Int)) Int x)", &p).unwrap();
        match verify(&p, &sol, &VerifyConfig::default()) {
            Verdict::Counterexample(pt) => assert!(pt["x"].as_int().unwrap() < &BigInt::from(0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn abs_correct_is_unknown_without_solver() {
        let p = parse(ABS).unwrap();
        let sol = parse_solution("(define-fun abs ((x Int)) Int (ite (>= x 0) x (- 0 x)))", &p).unwrap();
        assert!(matches!(verify(&p, &sol, &VerifyConfig::default()), Verdict::Unknown(_)));
        if let Some(smt) = z3() {
            let cfg = VerifyConfig { smt: Some(smt.clone()), ..VerifyConfig::default() };
            assert_eq!(verify(&p, &sol, &cfg), Verdict::Valid);
            let wrong = parse_solution("(define-fun abs ((x Int)) Int (ite (>= x 100) 0 (ite (>= x 0) x (- 0 x))))", &p)
                .unwrap();
            let grid_only = VerifyConfig { samples: 0, int_bound: 8, ..cfg };
            match verify(&p, &wrong, &grid_only) {
                Verdict::Counterexample(pt) => assert!(pt["x"].as_int().unwrap() >= &BigInt::from(100)),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn initials_wrong_on_one_row() {
        let p = parse(INITIALS).unwrap();
        // correct except when the surname starts at index 4
        let body = "(str.++ (str.at name 0) (str.++ \".\" (str.++ (str.at name (+ (str.indexof name \" \" 0) 1)) \".\")))";
        let text = format!("(define-fun f ((name String)) String {body})");
        let good = parse_solution(&text, &p).unwrap();
        assert_eq!(verify(&p, &good, &VerifyConfig::default()), Verdict::Valid);
        let bad = parse_solution(&text.replace("(str.indexof name \" \" 0)", "4"), &p).unwrap();
        match verify(&p, &bad, &VerifyConfig::default()) {
            Verdict::Counterexample(pt) => assert_eq!(first_violated(&p, &bad, &pt), Ok(Some(0))),
            other => panic!("unexpected {other:?}"),
        }
        let jan = format!("(define-fun f ((name String)) String (ite (= (str.len name) 9) \"J.\" {body}))");
        let jan = parse_solution(&jan, &p).unwrap();
        match verify(&p, &jan, &VerifyConfig::default()) {
            Verdict::Counterexample(pt) => assert_eq!(first_violated(&p, &jan, &pt), Ok(Some(2))),
            other => panic!("unexpected {other:?}"),
        }
    }
}
