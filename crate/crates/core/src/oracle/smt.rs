//! External solver over the SMT-LIB2 text protocol.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::verify::confirmed;
use super::Verdict;
use crate::frontend::sexpr::{parse_sexprs, Atom, SExpr};
use crate::ir::{substitute_targets, Problem, Solution, Sort, Symbol, Term, TermKind};
use crate::semantics::{eval_constraints, Point, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtConfig {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SmtConfig {
    /// Splits a command line such as `z3 -in` on whitespace.
    pub fn from_command(cmd: &str, timeout: Duration) -> Option<SmtConfig> {
        let mut words = cmd.split_whitespace().map(String::from);
        let program = words.next()?;
        Some(SmtConfig { program, args: words.collect(), timeout })
    }
}

fn smt_sort(s: Sort) -> String {
    match s {
        Sort::BitVec(w) => format!("(_ BitVec {w})"),
        other => other.to_string(),
    }
}

fn smt_term(t: &Term, out: &mut String) {
    match t.kind() {
        TermKind::Var(v) => out.push_str(v),
        TermKind::Lit(v) => out.push_str(&v.to_smtlib()),
        TermKind::App(f, args) => {
            if args.is_empty() {
                out.push_str(f.name());
                return;
            }
            out.push('(');
            out.push_str(f.name());
            for a in args {
                out.push(' ');
                smt_term(a, out);
            }
            out.push(')');
        }
        TermKind::Let(binds, body) => {
            out.push_str("(let (");
            for (i, (v, e)) in binds.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({v} ");
                smt_term(e, out);
                out.push(')');
            }
            out.push_str(") ");
            smt_term(body, out);
            out.push(')');
        }
    }
}

/// The query whose satisfying assignments are counterexamples.
pub fn smt_script(problem: &Problem, solution: &Solution) -> Result<String, String> {
    let mut out = String::from("(set-logic ALL)\n");
    for (v, s) in &problem.universals {
        let _ = writeln!(out, "(declare-fun {v} () {})", smt_sort(*s));
    }
    for m in &problem.macros {
        let params: Vec<String> = m.params.iter().map(|(n, s)| format!("({n} {})", smt_sort(*s))).collect();
        let _ = write!(out, "(define-fun {} ({}) {} ", m.name, params.join(" "), smt_sort(m.ret));
        smt_term(&m.body, &mut out);
        out.push_str(")\n");
    }
    let targets = problem.target_names();
    let parts = problem
        .constraints
        .iter()
        .map(|c| substitute_targets(c, solution, &targets))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    out.push_str("(assert (not ");
    match parts.as_slice() {
        [] => out.push_str("true"),
        [one] => smt_term(one, &mut out),
        many => {
            out.push_str("(and");
            for c in many {
                out.push(' ');
                smt_term(c, &mut out);
            }
            out.push(')');
        }
    }
    out.push_str("))\n(check-sat)\n(get-model)\n");
    Ok(out)
}

fn model_value(e: &SExpr, sort: Sort) -> Option<Value> {
    match (e, sort) {
        (SExpr::Atom(Atom::Int(n), _), Sort::Int) => Some(Value::Int(n.clone())),
        (SExpr::Atom(Atom::Symbol(s), _), Sort::Bool) => match s.as_str() {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        (SExpr::Atom(Atom::Str(s), _), Sort::String) => Some(Value::str(s)),
        (SExpr::Atom(Atom::Hex(h), _), Sort::BitVec(w)) => u64::from_str_radix(h, 16).ok().map(|b| Value::bv(w, b)),
        (SExpr::Atom(Atom::Bin(b), _), Sort::BitVec(w)) => u64::from_str_radix(b, 2).ok().map(|b| Value::bv(w, b)),
        (SExpr::List(items, _), _) => match items.as_slice() {
            [m, x] if m.symbol() == Some("-") && sort == Sort::Int => match model_value(x, sort)? {
                Value::Int(n) => Some(Value::Int(-n)),
                _ => None,
            },
            [u, bv, _] if u.symbol() == Some("_") => {
                let n: BigInt = bv.symbol()?.strip_prefix("bv")?.parse().ok()?;
                let Sort::BitVec(w) = sort else { return None };
                Some(Value::bv(w, (n % (BigInt::from(1u8) << w)).to_u64()?))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Reads `(define-fun x () S v)` entries, optionally wrapped in `(model ...)`.
/// Universals the model omits take their sort's default value.
pub fn parse_model(text: &str, universals: &[(Symbol, Sort)]) -> Result<Point, String> {
    let exprs = parse_sexprs(text).map_err(|e| e.to_string())?;
    let mut p = Point::new();
    let mut entries: Vec<&SExpr> = Vec::new();
    for e in &exprs {
        let Some(items) = e.list() else { continue };
        let items = match items.first().and_then(SExpr::symbol) {
            Some("model") => &items[1..],
            Some("define-fun") => std::slice::from_ref(e),
            _ => items,
        };
        entries.extend(items.iter().filter(|i| i.list().and_then(|l| l.first()?.symbol()) == Some("define-fun")));
    }
    for d in entries {
        let items = d.list().expect("filtered to lists");
        let [_, name, params, _, value] = items else {
            return Err(format!("malformed model entry `{d}`"));
        };
        let Some(name) = name.symbol() else { continue };
        if params.list().is_some_and(|ps| !ps.is_empty()) {
            continue;
        }
        let Some((n, s)) = universals.iter().find(|(n, _)| &**n == name) else { continue };
        let v = model_value(value, *s).ok_or_else(|| format!("cannot read value `{value}` for `{name}`"))?;
        p.insert(n.clone(), v);
    }
    for (n, s) in universals {
        p.entry(n.clone()).or_insert_with(|| Value::default_for(*s));
    }
    Ok(p)
}

/// Runs `cfg` on `input`, killing it at the deadline. Returns its stdout.
fn run_solver(cfg: &SmtConfig, input: &str) -> Result<String, String> {
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("io: cannot start `{}`: {e}", cfg.program))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    if let Some(mut stdin) = child.stdin.take() {
        if let Err(e) = stdin.write_all(input.as_bytes()) {
            let _ = child.kill();
            let _ = child.wait();
            return Err(format!("io: {e}"));
        }
    }
    let deadline = Instant::now() + cfg.timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("solver timed out after {:?}", cfg.timeout));
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(format!("io: {e}")),
        }
    }
    reader.join().map_err(|_| "io: reader thread panicked".to_string())
}

/// Asks the external solver whether the negated constraints are satisfiable.
pub fn external_check(problem: &Problem, solution: &Solution, cfg: &SmtConfig) -> Verdict {
    let script = match smt_script(problem, solution) {
        Ok(s) => s,
        Err(e) => return Verdict::Unknown(e),
    };
    let out = match run_solver(cfg, &script) {
        Ok(o) => o,
        Err(e) => return Verdict::Unknown(e),
    };
    let (answer, rest) = out.trim_start().split_once(char::is_whitespace).unwrap_or((out.trim(), ""));
    match answer {
        "unsat" => Verdict::Valid,
        "sat" => match parse_model(rest, &problem.universals) {
            Ok(p) if eval_constraints(problem, solution, &p) == Ok(false) => confirmed(problem, solution, p),
            Ok(_) => Verdict::Unknown("solver model does not falsify the constraints".into()),
            Err(e) => Verdict::Unknown(format!("unparsable model: {e}")),
        },
        other => Verdict::Unknown(format!("solver answered `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_forms() {
        let us = [("x".into(), Sort::Int), ("b".into(), Sort::BitVec(64)), ("s".into(), Sort::String)];
        let p = parse_model(
            "(model (define-fun x () Int (- 5)) (define-fun b () (_ BitVec 64) #x00000000000000ff))",
            &us,
        )
        .unwrap();
        assert_eq!(p["x"], Value::int(-5));
        assert_eq!(p["b"], Value::bv(64, 255));
        assert_eq!(p["s"], Value::str(""));
        let p = parse_model("(\n  (define-fun x () Int\n    -3)\n  (define-fun s () String \"a\"\"b\"))", &us).unwrap();
        assert_eq!(p["x"], Value::int(-3));
        assert_eq!(p["s"], Value::str("a\"b"));
    }

    #[test]
    fn missing_binary_is_unknown() {
        let cfg = SmtConfig::from_command("/nonexistent/solver -in", Duration::from_secs(1)).unwrap();
        assert!(matches!(run_solver(&cfg, ""), Err(e) if e.starts_with("io")));
    }
}
