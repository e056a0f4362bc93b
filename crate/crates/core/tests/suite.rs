mod common;

use std::fs;
use std::path::Path;
use std::time::Duration;

use common::*;
use sygus::frontend::{parse, parse_solution};
use sygus::harness::{read_records, run_suite, Outcome, RunRecord, SuiteConfig};
use sygus::oracle::{post_process, SmtConfig, Verdict, VerifyConfig};

fn with_solver() -> VerifyConfig {
    let smt = SmtConfig::from_command("z3 -in", Duration::from_secs(30)).filter(|_| z3_available());
    VerifyConfig { smt, ..VerifyConfig::default() }
}

fn classic_corpus(dir: &Path) {
    for f in ["qcc.sl", "abs.sl", "invariant.sl", "initials.sl"] {
        fs::copy(corpus_dir().join(f), dir.join(f)).unwrap();
    }
}

fn outcomes(rs: &[RunRecord]) -> Vec<(String, Outcome)> {
    rs.iter().map(|r| (r.benchmark.clone(), r.outcome)).collect()
}

#[test]
fn four_classic_benchmarks_within_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    classic_corpus(dir.path());
    let cfg = SuiteConfig { verify: with_solver(), ..SuiteConfig::default() };
    let rs = run_suite(dir.path(), &cfg).unwrap();
    assert_eq!(rs.len(), 4);
    let solved = rs.iter().filter(|r| r.outcome == Outcome::Solved).count();
    let expected = if cfg.verify.smt.is_some() { 3 } else { 1 };
    assert!(solved >= expected, "{:?}", outcomes(&rs));
    // the listing as printed has no inductive invariant
    let inv = rs.iter().find(|r| r.benchmark == "invariant.sl").unwrap();
    assert_eq!(inv.outcome, Outcome::Failed);
}

#[test]
fn solved_records_reverify_from_the_stored_text() {
    let dir = tempfile::tempdir().unwrap();
    classic_corpus(dir.path());
    let out = dir.path().join("records.csv");
    let cfg = SuiteConfig { verify: with_solver(), records: Some(out.clone()), ..SuiteConfig::default() };
    run_suite(dir.path(), &cfg).unwrap();
    let rs = read_records(&out).unwrap();
    assert_eq!(rs.len(), 4);
    for r in rs.iter().filter(|r| r.outcome == Outcome::Solved) {
        let problem = parse(&fs::read_to_string(dir.path().join(&r.benchmark)).unwrap()).unwrap();
        let sol = parse_solution(r.solution.as_deref().unwrap(), &problem).unwrap();
        assert_eq!(post_process(&problem, &sol, &cfg.verify), Verdict::Valid, "{}", r.benchmark);
        let size: usize = sol.values().map(|d| d.body.size()).sum();
        assert_eq!(Some(size), r.size);
    }
}

#[test]
fn interrupted_runs_resume() {
    let dir = tempfile::tempdir().unwrap();
    classic_corpus(dir.path());
    let out = dir.path().join("records.csv");
    let cfg = SuiteConfig { records: Some(out.clone()), ..SuiteConfig::default() };
    let first = run_suite(dir.path(), &cfg).unwrap();

    // drop the last two rows as if the run had crashed
    let text = fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<RunRecord> = rdr.deserialize().map(Result::unwrap).collect();
    let mut w = csv::Writer::from_path(&out).unwrap();
    for r in &rows[..2] {
        w.serialize(r).unwrap();
    }
    w.flush().unwrap();
    drop(w);

    let second = run_suite(dir.path(), &cfg).unwrap();
    assert_eq!(outcomes(&first), outcomes(&second));
    let stored = read_records(&out).unwrap();
    assert_eq!(stored.len(), 4);
    // kept rows are reused as-is
    for r in &rows[..2] {
        assert!(second.contains(r));
    }
    let third = run_suite(dir.path(), &cfg).unwrap();
    assert_eq!(third, second);
    assert_eq!(read_records(&out).unwrap().len(), 4);
}

#[test]
fn repeated_runs_agree_on_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    classic_corpus(dir.path());
    let cfg = SuiteConfig { workers: 2, ..SuiteConfig::default() };
    let a = run_suite(dir.path(), &cfg).unwrap();
    let b = run_suite(dir.path(), &cfg).unwrap();
    assert_eq!(outcomes(&a), outcomes(&b));
    let sols = |rs: &[RunRecord]| rs.iter().map(|r| r.solution.clone()).collect::<Vec<_>>();
    assert_eq!(sols(&a), sols(&b));
}

#[test]
fn empty_directory_gives_no_records() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_suite(dir.path(), &SuiteConfig::default()).unwrap().is_empty());
}

#[test]
fn timeouts_record_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(corpus_dir().join("invariant_guarded.sl"), dir.path().join("inv.sl")).unwrap();
    let cfg = SuiteConfig { timeout: Duration::from_millis(200), verify: with_solver(), ..SuiteConfig::default() };
    let rs = run_suite(dir.path(), &cfg).unwrap();
    assert_eq!(rs[0].outcome, Outcome::Timeout);
    assert_eq!(rs[0].seconds, 0.2);
}

#[test]
fn bad_files_fail_without_stopping_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a_broken.sl"), "(synth-fun f (").unwrap();
    fs::write(dir.path().join("b_unknown.sl"), "(frobnicate)").unwrap();
    fs::copy(corpus_dir().join("qm_inner_loop.sl"), dir.path().join("c.sl")).unwrap();
    fs::write(dir.path().join("notes.txt"), "not a benchmark").unwrap();
    let rs = run_suite(dir.path(), &SuiteConfig::default()).unwrap();
    let got = outcomes(&rs);
    assert_eq!(got.len(), 3);
    assert_eq!(got[0].1, Outcome::Failed);
    assert_eq!(got[1].1, Outcome::Failed);
    assert_ne!(got[2].1, Outcome::Failed);
}
