mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sygus::engine::{Budget, Enumerator};
use sygus::frontend::{emit_problem, parse, parse_term};
use sygus::harness::{score, size_bucket, time_bucket, Outcome, RunRecord};
use sygus::ir::{Op, Sort, Term};
use sygus::oracle::{check_conformance, Conformance};
use sygus::semantics::{eval_with_vars, Defs, Value};

const TIME_EDGES: [f64; 8] = [1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 3600.0];
const SIZE_EDGES: [usize; 5] = [10, 30, 100, 300, 1000];

fn int_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (-20i64..20).prop_map(Term::int),
        Just(Term::var("x", Sort::Int)),
        Just(Term::var("y", Sort::Int)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let cond = (inner.clone(), inner.clone(), 0..3usize).prop_map(|(a, b, k)| {
            let op = [Op::Le, Op::Eq, Op::Lt][k];
            Term::app(op, vec![a, b]).unwrap()
        });
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Add, vec![a, b]).unwrap()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(Op::Sub, vec![a, b]).unwrap()),
            (inner.clone(), -3i64..4).prop_map(|(a, k)| Term::app(Op::Mul, vec![Term::int(k), a]).unwrap()),
            (cond.clone(), cond, inner.clone(), inner).prop_map(|(c, d, a, b)| {
                let both = Term::app(Op::And, vec![c, Term::app(Op::Not, vec![d]).unwrap()]).unwrap();
                Term::ite(both, a, b).unwrap()
            }),
        ]
    })
}

fn record() -> impl Strategy<Value = (usize, usize, u8, f64, usize)> {
    (0..5usize, 0..4usize, 0..6u8, 0.0..4000.0f64, 1..2000usize)
}

fn outcome(k: u8) -> Outcome {
    [Outcome::Solved, Outcome::Failed, Outcome::Timeout, Outcome::Nonconformant, Outcome::SemanticsFailed, Outcome::UnknownVerified]
        [k as usize]
}

proptest! {
    #[test]
    fn time_bucket_steps_at_each_boundary(eps in 1e-9..0.5f64) {
        for (i, b) in TIME_EDGES.iter().enumerate() {
            prop_assert_eq!(time_bucket(b - eps) + 1, time_bucket(*b));
            prop_assert_eq!(time_bucket(*b), i + 1);
        }
        for b in SIZE_EDGES {
            prop_assert_eq!(size_bucket(b - 1) + 1, size_bucket(b));
        }
    }

    #[test]
    fn buckets_are_monotone_and_match_the_reference(a in 0.0..5000.0f64, b in 0.0..5000.0f64, n in 1..3000usize, m in 1..3000usize) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(time_bucket(lo) <= time_bucket(hi));
        prop_assert_eq!(time_bucket(a), reference_time_bucket(a));
        prop_assert_eq!(size_bucket(n), reference_size_bucket(n));
        if n <= m {
            prop_assert!(size_bucket(n) <= size_bucket(m));
        }
    }

    #[test]
    fn score_ignores_record_order(rows in prop::collection::vec(record(), 0..30), seed in any::<u64>()) {
        let mut seen = BTreeSet::new();
        let records: Vec<RunRecord> = rows
            .into_iter()
            .filter(|r| seen.insert((r.0, r.1)))
            .map(|(b, e, k, seconds, size)| RunRecord {
                benchmark: format!("b{b}"),
                engine: format!("e{e}"),
                outcome: outcome(k),
                seconds,
                cpu_seconds: None,
                size: Some(size),
                solution: None,
                detail: String::new(),
            })
            .collect();
        let mut shuffled = records.clone();
        let n = shuffled.len();
        if n > 1 {
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        prop_assert_eq!(score(&records).unwrap(), score(&shuffled).unwrap());
    }

    #[test]
    fn terms_print_and_parse_back(t in int_term()) {
        let (_, p) = corpus("abs.sl");
        let vars = [("x".into(), Sort::Int), ("y".into(), Sort::Int)];
        let back = parse_term(&t.to_string(), &p, &vars).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn pruned_values_match_brute_force(g in 0..TOY_GRAMMARS.len(), xs in prop::collection::vec(-6i64..7, 1..5)) {
        let p = toy(g);
        let t = &p.targets[0];
        let grammar = t.grammar();
        let inputs: Vec<Vec<Value>> = xs.iter().map(|&x| vec![Value::int(x)]).collect();
        let mut en = Enumerator::new(grammar, &p.macros, &t.params, inputs.clone(), true);
        en.ensure(grammar.start(), 5, &Budget::unlimited(), &mut |_, _| false).unwrap();
        let pruned: BTreeSet<Vec<Value>> =
            en.entries(grammar.start()).filter(|e| e.term.size() <= 5).map(|e| e.vals.to_vec()).collect();
        let lang = brute_force(grammar, &p, 5);
        let funs = Defs::macros(&p.macros);
        let brute: BTreeSet<Vec<Value>> = lang
            .terms(grammar.start())
            .map(|term| inputs.iter().map(|i| eval_with_vars(term, &[("x".into(), i[0].clone())], &funs).unwrap()).collect())
            .collect();
        prop_assert_eq!(pruned, brute);
    }

    #[test]
    fn conformance_matches_membership(g in 0..TOY_GRAMMARS.len(), h in 0..TOY_GRAMMARS.len()) {
        let (p, q) = (toy(g), toy(h));
        let gp = p.targets[0].grammar();
        let mine = brute_force(gp, &p, 6).set(gp.start());
        let gq = q.targets[0].grammar();
        for t in brute_force(gq, &q, 6).terms(gq.start()) {
            let valid = check_conformance(t, gp) == Conformance::Valid;
            prop_assert_eq!(valid, mine.contains(&t.to_string()), "{}", t);
        }
    }
}

#[test]
fn corpus_round_trips() {
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        let p = parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let again = parse(&emit_problem(&p)).unwrap();
        assert_eq!(again, p, "{}", path.display());
        assert_eq!(emit_problem(&again), emit_problem(&p));
    }
}
