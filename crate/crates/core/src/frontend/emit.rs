use std::fmt::Write;

use crate::ir::{Definition, Problem, Solution, Sort, Symbol, TargetGrammar};

fn params(ps: &[(Symbol, Sort)]) -> String {
    let inner: Vec<String> = ps.iter().map(|(n, s)| format!("({n} {s})")).collect();
    format!("({})", inner.join(" "))
}

/// `(define-fun name ((x S) ...) R body)`
pub fn emit_definition(name: &str, def: &Definition, ret: Sort) -> String {
    format!("(define-fun {name} {} {ret} {})", params(&def.params), def.body)
}

/// One `define-fun` per target, in declaration order.
pub fn emit_solution(problem: &Problem, solution: &Solution) -> String {
    let mut out = String::new();
    for t in &problem.targets {
        if let Some(def) = solution.get(&t.name) {
            out.push_str(&emit_definition(&t.name, def, t.ret));
            out.push('\n');
        }
    }
    out
}

/// Full benchmark text. Invariant problems are printed in their desugared
/// form, so reading the output back yields the same problem.
pub fn emit_problem(problem: &Problem) -> String {
    let mut out = format!("(set-logic {})\n", problem.logic);
    for m in &problem.macros {
        let _ = writeln!(out, "(define-fun {} {} {} {})", m.name, params(&m.params), m.ret, m.body);
    }
    for t in &problem.targets {
        let _ = write!(out, "(synth-fun {} {} {}", t.name, params(&t.params), t.ret);
        if let TargetGrammar::Explicit(g) = &t.grammar {
            let _ = write!(out, "\n  {g}");
        }
        out.push_str(")\n");
    }
    for (v, s) in &problem.universals {
        let _ = writeln!(out, "(declare-var {v} {s})");
    }
    for c in &problem.constraints {
        let _ = writeln!(out, "(constraint {c})");
    }
    out.push_str("(check-synth)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::ir::{Op, Term};
    use crate::semantics::Value;

    #[test]
    fn abs_definition() {
        let x = Term::var("x", Sort::Int);
        let body = Term::ite(
            Term::app(Op::Ge, vec![x.clone(), Term::int(0)]).unwrap(),
            x.clone(),
            Term::app(Op::Sub, vec![Term::int(0), x]).unwrap(),
        )
        .unwrap();
        let def = Definition { params: vec![("x".into(), Sort::Int)], body };
        assert_eq!(
            emit_definition("abs", &def, Sort::Int),
            "(define-fun abs ((x Int)) Int (ite (>= x 0) x (- 0 x)))"
        );
    }

    #[test]
    fn literals() {
        assert_eq!(Term::lit(Value::bv(64, 1)).to_string(), "#x0000000000000001");
        assert_eq!(Term::lit(Value::str(" ")).to_string(), "\" \"");
        assert_eq!(Term::int(-3).to_string(), "-3");
    }

    #[test]
    fn problem_round_trip() {
        let text = "(set-logic SLIA)
(synth-fun f ((name String)) String
  ((Start String (ntString))
   (ntString String (name \" \" \".\" (str.++ ntString ntString) (str.at ntString ntInt)))
   (ntInt Int (0 1 (str.indexof ntString ntString ntInt)))))
(declare-var name String)
(constraint (= (f \"Nancy FreeHafer\") \"N.F.\"))
(check-synth)";
        let p = parse(text).unwrap();
        let again = parse(&emit_problem(&p)).unwrap();
        assert_eq!(again, p);
    }
}
