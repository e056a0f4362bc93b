#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use sygus::frontend::parse;
use sygus::ir::{Func, GTerm, Grammar, Problem, Term};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus(name: &str) -> (String, Problem) {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let p = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    (text, p)
}

pub fn z3_available() -> bool {
    std::process::Command::new("z3").arg("-version").output().is_ok_and(|o| o.status.success())
}

/// Every term derivable from each nonterminal, grouped by exact size, up to
/// `max`. Straight dynamic programming over productions, no pruning.
pub struct Language {
    pub by_size: Vec<Vec<Vec<Term>>>,
}

impl Language {
    pub fn terms(&self, nt: usize) -> impl Iterator<Item = &Term> {
        self.by_size[nt].iter().flatten()
    }

    pub fn set(&self, nt: usize) -> BTreeSet<String> {
        self.terms(nt).map(|t| t.to_string()).collect()
    }
}

pub fn brute_force(g: &Grammar, problem: &Problem, max: usize) -> Language {
    let n = g.len();
    let mut by_size: Vec<Vec<Vec<Term>>> = vec![vec![Vec::new(); max + 1]; n];
    for s in 1..=max {
        // unit productions at the same size need a fixpoint
        loop {
            let mut grew = false;
            for nt in 0..n {
                let mut fresh: Vec<Term> = Vec::new();
                for p in g.productions(nt) {
                    let holes = p.holes();
                    let skel = p.skeleton_size();
                    if skel > s || (holes.is_empty() && skel != s) {
                        continue;
                    }
                    for fill in splits(&holes, s - skel, &by_size) {
                        fresh.push(build(p, &mut fill.into_iter(), problem));
                    }
                }
                let have: BTreeSet<String> = by_size[nt][s].iter().map(|t| t.to_string()).collect();
                let mut seen = have.clone();
                for t in fresh {
                    if seen.insert(t.to_string()) {
                        by_size[nt][s].push(t);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
    Language { by_size }
}

fn splits(holes: &[usize], total: usize, by_size: &[Vec<Vec<Term>>]) -> Vec<Vec<Term>> {
    if holes.is_empty() {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        let Some(heads) = by_size[holes[0]].get(first) else { continue };
        if heads.is_empty() {
            continue;
        }
        let rests = splits(&holes[1..], total - first, by_size);
        for h in heads {
            for r in &rests {
                let mut v = vec![h.clone()];
                v.extend(r.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

fn build(p: &GTerm, fill: &mut impl Iterator<Item = Term>, problem: &Problem) -> Term {
    match p {
        GTerm::Nt(_) => fill.next().expect("filler"),
        GTerm::Leaf(t) => t.clone(),
        GTerm::App { func, args, .. } => {
            let args: Vec<Term> = args.iter().map(|a| build(a, fill, problem)).collect();
            match func {
                Func::Theory(op) => Term::app(*op, args).expect("well sorted"),
                Func::User(name) => Term::call(&problem.fun_sig(name).expect("declared"), args).expect("well sorted"),
            }
        }
    }
}

/// Reference bucket scales written out as explicit intervals.
pub fn reference_time_bucket(t: f64) -> usize {
    let bands: [(f64, f64); 9] = [
        (0.0, 1.0),
        (1.0, 3.0),
        (3.0, 10.0),
        (10.0, 30.0),
        (30.0, 100.0),
        (100.0, 300.0),
        (300.0, 1000.0),
        (1000.0, 3600.0),
        (3600.0, f64::INFINITY),
    ];
    bands.iter().position(|&(lo, hi)| lo <= t && t < hi).expect("non-negative time")
}

pub fn reference_size_bucket(n: usize) -> usize {
    let bands: [(usize, usize); 6] = [(1, 10), (10, 30), (30, 100), (100, 300), (300, 1000), (1000, usize::MAX)];
    bands.iter().position(|&(lo, hi)| lo <= n && n < hi).expect("positive size")
}

/// (solved, uniquely solved, among fastest) per engine, counted the long way.
pub fn reference_score(rows: &[(&str, &str, bool, f64)]) -> HashMap<String, (usize, usize, usize)> {
    let mut out: HashMap<String, (usize, usize, usize)> = HashMap::new();
    for (_, e, _, _) in rows {
        out.entry(e.to_string()).or_default();
    }
    let benches: BTreeSet<&str> = rows.iter().map(|r| r.0).collect();
    for b in benches {
        let solved: Vec<_> = rows.iter().filter(|r| r.0 == b && r.2).collect();
        let best = solved.iter().map(|r| reference_time_bucket(r.3)).min();
        for r in &solved {
            let e = out.get_mut(r.1).unwrap();
            e.0 += 1;
            if solved.len() == 1 {
                e.1 += 1;
            }
            if Some(reference_time_bucket(r.3)) == best {
                e.2 += 1;
            }
        }
    }
    out
}

/// Five small grammars over one Int parameter `x`, sharing operators so
/// their languages overlap.
pub const TOY_GRAMMARS: [&str; 5] = [
    "(synth-fun f ((x Int)) Int ((S Int (x 0 1 (+ S S)))))",
    "(synth-fun f ((x Int)) Int ((S Int (x (+ S 1) (- S x)))))",
    "(synth-fun f ((x Int)) Int ((S Int ((+ A B))) (A Int (x (+ A A))) (B Int (0 1))))",
    "(synth-fun f ((x Int)) Int ((S Int (x 1 (ite C S S))) (C Bool ((<= S S) (= x 0)))))",
    "(synth-fun f ((x Int)) Int ((S Int (A)) (A Int (x 0 (- A A) B)) (B Int (1 (+ A 1)))))",
];

pub fn toy(i: usize) -> Problem {
    parse(&format!("(set-logic LIA)\n{}\n(check-synth)\n", TOY_GRAMMARS[i])).expect("toy grammar parses")
}
