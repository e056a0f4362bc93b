use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::{read_records, HarnessError, Outcome, RunRecord};
use crate::engine::{self, EngineConfig, Failure};
use crate::frontend::{emit_solution, parse};
use crate::oracle::{post_process, Verdict, VerifyConfig};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub engine: EngineConfig,
    pub engine_id: String,
    /// Wallclock limit per benchmark. CPU time is recorded, not limited.
    pub timeout: Duration,
    pub workers: usize,
    /// Post-processing configuration (the external solver lives here).
    pub verify: VerifyConfig,
    /// CSV file appended to after every benchmark; rows already present for
    /// this engine are skipped on the next run.
    pub records: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            engine: EngineConfig::default(),
            engine_id: "auto".into(),
            timeout: Duration::from_secs(60),
            workers: 1,
            verify: VerifyConfig::default(),
            records: None,
        }
    }
}

fn thread_cpu_seconds() -> Option<f64> {
    let s = fs::read_to_string("/proc/thread-self/schedstat").ok()?;
    let ns: f64 = s.split_whitespace().next()?.parse().ok()?;
    Some(ns / 1e9)
}

fn record(path: &Path, cfg: &SuiteConfig, outcome: Outcome, seconds: f64, detail: String) -> RunRecord {
    RunRecord {
        benchmark: bench_id(path),
        engine: cfg.engine_id.clone(),
        outcome,
        seconds,
        cpu_seconds: None,
        size: None,
        solution: None,
        detail,
    }
}

fn bench_id(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Parses, solves and post-processes one benchmark file.
pub fn run_one(path: &Path, cfg: &SuiteConfig) -> RunRecord {
    let started = Instant::now();
    let cpu0 = thread_cpu_seconds();
    let mut r = solve_file(path, cfg, started);
    if let (Some(a), Some(b)) = (cpu0, thread_cpu_seconds()) {
        r.cpu_seconds = Some(b - a);
    }
    r
}

fn solve_file(path: &Path, cfg: &SuiteConfig, started: Instant) -> RunRecord {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return record(path, cfg, Outcome::Failed, 0.0, format!("unreadable: {e}")),
    };
    let problem = match parse(&text) {
        Ok(p) => p,
        Err(e) => return record(path, cfg, Outcome::Failed, started.elapsed().as_secs_f64(), format!("parse: {e}")),
    };
    let mut ecfg = EngineConfig { timeout: Some(cfg.timeout), ..cfg.engine.clone() };
    if ecfg.verify.smt.is_none() {
        ecfg.verify.smt = cfg.verify.smt.clone();
    }
    let out = match engine::solve(&problem, &ecfg) {
        Ok(o) => o,
        Err(Failure::Timeout) => {
            return record(path, cfg, Outcome::Timeout, cfg.timeout.as_secs_f64(), "wallclock limit".into())
        }
        Err(e) => return record(path, cfg, Outcome::Failed, started.elapsed().as_secs_f64(), e.to_string()),
    };
    let verdict = post_process(&problem, &out.solution, &cfg.verify);
    let seconds = started.elapsed().as_secs_f64();
    let (outcome, detail) = match verdict {
        Verdict::Valid => (Outcome::Solved, String::new()),
        Verdict::Unknown(why) => (Outcome::UnknownVerified, why),
        Verdict::Counterexample(p) => {
            let shown: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            (Outcome::SemanticsFailed, format!("counterexample {}", shown.join(" ")))
        }
        Verdict::NonConformant { target, path } => (Outcome::Nonconformant, format!("{target} at {path:?}")),
    };
    if seconds > cfg.timeout.as_secs_f64() {
        return record(path, cfg, Outcome::Timeout, cfg.timeout.as_secs_f64(), "wallclock limit".into());
    }
    let mut r = record(path, cfg, outcome, seconds, detail);
    r.size = Some(out.solution.values().map(|d| d.body.size()).sum());
    r.solution = Some(emit_solution(&problem, &out.solution));
    r
}

/// Runs every `.sl` file of `dir` (sorted by name) on a pool of workers.
/// Returns all records for this engine, including ones resumed from the
/// records file.
pub fn run_suite(dir: &Path, cfg: &SuiteConfig) -> Result<Vec<RunRecord>, HarnessError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sl"))
        .collect();
    files.sort();
    let mut done: Vec<RunRecord> = match &cfg.records {
        Some(p) if p.exists() && fs::metadata(p)?.len() > 0 => read_records(p)?,
        _ => Vec::new(),
    };
    done.retain(|r| r.engine == cfg.engine_id);
    let finished: HashSet<String> = done.iter().map(|r| r.benchmark.clone()).collect();
    let todo: Vec<PathBuf> = files.into_iter().filter(|f| !finished.contains(&bench_id(f))).collect();
    let mut writer = match &cfg.records {
        Some(p) => {
            let fresh = !p.exists() || fs::metadata(p)?.len() == 0;
            let f = OpenOptions::new().create(true).append(true).open(p)?;
            Some(csv::WriterBuilder::new().has_headers(fresh).from_writer(f))
        }
        None => None,
    };
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<RunRecord>();
    let workers = cfg.workers.max(1).min(todo.len().max(1));
    let mut fresh: Vec<RunRecord> = Vec::new();
    thread::scope(|s| -> Result<(), HarnessError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (todo, next) = (&todo, &next);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = todo.get(i) else { break };
                let r = catch_unwind(AssertUnwindSafe(|| run_one(path, cfg)))
                    .unwrap_or_else(|_| record(path, cfg, Outcome::Failed, 0.0, "engine panicked".into()));
                if tx.send(r).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for r in rx {
            if let Some(w) = writer.as_mut() {
                w.serialize(&r)?;
                w.flush()?;
            }
            fresh.push(r);
        }
        Ok(())
    })?;
    done.extend(fresh);
    done.sort_by(|a, b| a.benchmark.cmp(&b.benchmark));
    Ok(done)
}
