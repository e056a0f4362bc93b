use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use sygus::engine::{self, bv_sample, generate_nuggets, Budget, EngineConfig, Failure, Mode};
use sygus::frontend::{emit_problem, emit_solution, parse, parse_solution};
use sygus::harness::{read_records, run_suite, score, SuiteConfig};
use sygus::ir::{Op, Sort, Term};
use sygus::oracle::{post_process, SmtConfig, Verdict, VerifyConfig};
use sygus::semantics::{eval_with_vars, Defs, Value};

const OK: u8 = 0;
const FAILURE: u8 = 1;
const TIMEOUT: u8 = 2;
const INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "sygus", version, about = "Syntax-guided synthesis: solve, verify, benchmark and score")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct EngineOpts {
    /// cegis, unif or auto
    #[arg(long, default_value = "auto")]
    engine: Mode,
    /// Wallclock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Largest term size the enumerator builds.
    #[arg(long, default_value_t = 12)]
    max_size: usize,
    /// Seed for the verifier's random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// External SMT solver command line, e.g. "z3 -in".
    #[arg(long)]
    smt_cmd: Option<String>,
}

impl EngineOpts {
    fn verify(&self) -> VerifyConfig {
        let smt = self.smt_cmd.as_deref().and_then(|c| SmtConfig::from_command(c, Duration::from_secs(30)));
        VerifyConfig { seed: self.seed, smt, ..VerifyConfig::default() }
    }

    fn engine(&self) -> EngineConfig {
        let d = EngineConfig::default();
        EngineConfig {
            mode: self.engine,
            max_term_size: self.max_size,
            timeout: Some(Duration::from_secs_f64(self.timeout)),
            verify: VerifyConfig { seed: self.seed, smt: self.verify().smt, ..d.verify.clone() },
            ..d
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize and print the solution as define-fun commands.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
    },
    /// Check a solution file against a problem.
    Verify {
        file: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        smt_cmd: Option<String>,
    },
    /// Run every .sl file in a directory and write run records.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Records CSV; appended to and resumed from.
        #[arg(long, default_value = "records.csv")]
        out: PathBuf,
        /// Engine name written into the records.
        #[arg(long)]
        name: Option<String>,
    },
    /// Score a records CSV and print the JSON report.
    Score {
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate PBE benchmarks from the k-nuggets of a problem's grammar.
    Nuggets {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Examples per generated benchmark.
        #[arg(long, default_value_t = 10)]
        examples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one file per nugget here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Solve { file, opts } => solve(file, &opts),
        Cmd::Verify { file, solution, seed, smt_cmd } => verify(file, solution, seed, smt_cmd),
        Cmd::Bench { dir, opts, workers, out, name } => bench(dir, &opts, workers, out, name),
        Cmd::Score { records, out } => score_cmd(records, out),
        Cmd::Nuggets { file, k, examples, seed, out_dir } => nuggets(file, k, examples, seed, out_dir),
    };
    ExitCode::from(code)
}

fn load(file: &PathBuf) -> Result<sygus::ir::Problem, u8> {
    let text = fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        INPUT
    })?;
    parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", file.display());
        INPUT
    })
}

fn solve(file: PathBuf, opts: &EngineOpts) -> u8 {
    let problem = match load(&file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    match engine::solve(&problem, &opts.engine()) {
        Ok(out) => {
            print!("{}", emit_solution(&problem, &out.solution));
            match post_process(&problem, &out.solution, &opts.verify()) {
                Verdict::Valid => OK,
                Verdict::Unknown(why) => {
                    eprintln!("note: {why}");
                    OK
                }
                other => {
                    eprintln!("error: solution rejected: {other:?}");
                    FAILURE
                }
            }
        }
        Err(Failure::Timeout) => {
            eprintln!("timeout");
            TIMEOUT
        }
        Err(e) => {
            eprintln!("failure: {e}");
            FAILURE
        }
    }
}

fn verify(file: PathBuf, solution: PathBuf, seed: u64, smt_cmd: Option<String>) -> u8 {
    let problem = match load(&file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let sol = match fs::read_to_string(&solution).map_err(|e| e.to_string()).and_then(|t| {
        parse_solution(&t, &problem).map_err(|e| e.to_string())
    }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", solution.display());
            return INPUT;
        }
    };
    let smt = smt_cmd.as_deref().and_then(|c| SmtConfig::from_command(c, Duration::from_secs(30)));
    match post_process(&problem, &sol, &VerifyConfig { seed, smt, ..VerifyConfig::default() }) {
        Verdict::Valid => {
            println!("valid");
            OK
        }
        Verdict::Counterexample(p) => {
            let shown: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("counterexample {}", shown.join(" "));
            FAILURE
        }
        Verdict::NonConformant { target, path } => {
            println!("nonconformant {target} at {path:?}");
            FAILURE
        }
        Verdict::Unknown(why) => {
            println!("unknown: {why}");
            FAILURE
        }
    }
}

fn bench(dir: PathBuf, opts: &EngineOpts, workers: usize, out: PathBuf, name: Option<String>) -> u8 {
    let cfg = SuiteConfig {
        engine: opts.engine(),
        engine_id: name.unwrap_or_else(|| format!("{:?}", opts.engine).to_lowercase()),
        timeout: Duration::from_secs_f64(opts.timeout),
        workers,
        verify: opts.verify(),
        records: Some(out),
    };
    match run_suite(&dir, &cfg) {
        Ok(records) => {
            for r in &records {
                println!("{}\t{:?}\t{:.3}s\t{}", r.benchmark, r.outcome, r.seconds, r.size.map_or("-".into(), |s| s.to_string()));
            }
            OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            INPUT
        }
    }
}

fn score_cmd(records: PathBuf, out: Option<PathBuf>) -> u8 {
    let report = match read_records(&records).map_err(|e| e.to_string()).and_then(|r| score(&r).map_err(|e| e.to_string())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return INPUT;
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match out {
        Some(p) => {
            if let Err(e) = fs::write(&p, json) {
                eprintln!("error: {}: {e}", p.display());
                return INPUT;
            }
        }
        None => println!("{json}"),
    }
    OK
}

fn sample_inputs(params: &[(sygus::ir::Symbol, Sort)], n: usize, seed: u64) -> Option<Vec<Vec<Value>>> {
    let cols: Vec<Vec<Value>> = params
        .iter()
        .enumerate()
        .map(|(i, (_, s))| match s {
            Sort::BitVec(w) => Some(bv_sample(n, seed + i as u64).into_iter().map(|b| Value::bv(*w, b)).collect()),
            Sort::Int => Some((0..n as i64).map(|k| Value::int(k * 3 - 7 + i as i64)).collect()),
            _ => None,
        })
        .collect::<Option<_>>()?;
    Some((0..n).map(|k| cols.iter().map(|c| c[k].clone()).collect()).collect())
}

fn nuggets(file: PathBuf, k: usize, examples: usize, seed: u64, out_dir: Option<PathBuf>) -> u8 {
    let problem = match load(&file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let Some(target) = problem.targets.first() else {
        eprintln!("error: no synth-fun in {}", file.display());
        return INPUT;
    };
    let Some(inputs) = sample_inputs(&target.params, examples, seed) else {
        eprintln!("error: nugget sampling supports Int and bitvector parameters only");
        return INPUT;
    };
    let found = match generate_nuggets(target.grammar(), &problem.macros, &target.params, k, &inputs, &Budget::unlimited()) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("failure: {e}");
            return FAILURE;
        }
    };
    if let Some(d) = &out_dir {
        if let Err(e) = fs::create_dir_all(d) {
            eprintln!("error: {}: {e}", d.display());
            return INPUT;
        }
    }
    let funs = Defs::macros(&problem.macros);
    for (n, t) in found.iter().enumerate() {
        let mut p = problem.clone();
        p.universals.clear();
        p.constraints.clear();
        for input in &inputs {
            let vars: Vec<_> = target.params.iter().map(|v| v.0.clone()).zip(input.iter().cloned()).collect();
            let Ok(out) = eval_with_vars(t, &vars, &funs) else { continue };
            let call = Term::call(&target.sig(), input.iter().cloned().map(Term::lit).collect()).expect("well sorted");
            p.constraints.push(Term::app(Op::Eq, vec![call, Term::lit(out)]).expect("well sorted"));
        }
        let text = format!("; nugget {t}\n{}", emit_problem(&p));
        match &out_dir {
            Some(d) => {
                let path = d.join(format!("nugget_{k}_{n:04}.sl"));
                if let Err(e) = fs::write(&path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return INPUT;
                }
            }
            None => println!("{text}"),
        }
    }
    OK
}
