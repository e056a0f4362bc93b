use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::sexpr::{parse_sexprs, Atom, Pos, SExpr};
use super::{default_grammar, desugar_invariant, FrontendError, InvariantSpec};
use crate::ir::{
    Definition, FunSig, GTerm, Grammar, Logic, Macro, Nonterminal, Op, Problem, Solution, Sort, Symbol,
    SynthTarget, TargetGrammar, Term,
};
use crate::semantics::Value;

fn parse_err(pos: Pos, msg: impl Into<String>) -> FrontendError {
    FrontendError::Parse { line: pos.line, col: pos.col, msg: msg.into() }
}

fn sort_err(pos: Pos, msg: impl Into<String>) -> FrontendError {
    FrontendError::Sort { line: pos.line, col: pos.col, msg: msg.into() }
}

fn symbol(e: &SExpr, what: &str) -> Result<Symbol, FrontendError> {
    e.symbol().map(Symbol::from).ok_or_else(|| parse_err(e.pos(), format!("expected {what}, found `{e}`")))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], FrontendError> {
    e.list().ok_or_else(|| parse_err(e.pos(), format!("expected {what}, found `{e}`")))
}

fn numeral(e: &SExpr) -> Option<u64> {
    match e {
        SExpr::Atom(Atom::Int(n), _) => n.to_u64(),
        _ => None,
    }
}

fn parse_sort(e: &SExpr) -> Result<Sort, FrontendError> {
    let bad = || parse_err(e.pos(), format!("unknown sort `{e}`"));
    match e {
        SExpr::Atom(Atom::Symbol(s), _) => match s.as_str() {
            "Int" => Ok(Sort::Int),
            "Bool" => Ok(Sort::Bool),
            "String" => Ok(Sort::String),
            _ => Err(bad()),
        },
        SExpr::List(items, _) => {
            let w = match items.as_slice() {
                [h, w] if h.symbol() == Some("BitVec") => w,
                [u, h, w] if u.symbol() == Some("_") && h.symbol() == Some("BitVec") => w,
                _ => return Err(bad()),
            };
            let w = numeral(w).and_then(|w| u32::try_from(w).ok()).ok_or_else(bad)?;
            Sort::bv(w).ok_or_else(|| parse_err(e.pos(), format!("bitvector width {w} outside 1..=64")))
        }
        _ => Err(bad()),
    }
}

fn parse_params(e: &SExpr) -> Result<Vec<(Symbol, Sort)>, FrontendError> {
    list(e, "parameter list")?
        .iter()
        .map(|p| match p.list() {
            Some([n, s]) => Ok((symbol(n, "parameter name")?, parse_sort(s)?)),
            _ => Err(parse_err(p.pos(), format!("expected `(name Sort)`, found `{p}`"))),
        })
        .collect()
}

fn bv_literal(digits: &str, radix: u32, bits_per_digit: usize, pos: Pos) -> Result<Value, FrontendError> {
    let width = digits.len() * bits_per_digit;
    if width > crate::ir::MAX_BV_WIDTH as usize {
        return Err(parse_err(pos, format!("bitvector literal of width {width} exceeds 64 bits")));
    }
    let bits = u64::from_str_radix(digits, radix).map_err(|e| parse_err(pos, e.to_string()))?;
    Ok(Value::bv(width as u32, bits))
}

/// Name resolution for term parsing: local variables (innermost last), then
/// macros and targets.
struct Scope<'a> {
    logic: Logic,
    macros: &'a [Macro],
    targets: &'a [SynthTarget],
    vars: Vec<(Symbol, Sort)>,
}

impl<'a> Scope<'a> {
    fn new(logic: Logic, macros: &'a [Macro], targets: &'a [SynthTarget], vars: &[(Symbol, Sort)]) -> Self {
        Scope { logic, macros, targets, vars: vars.to_vec() }
    }

    fn var(&self, name: &str) -> Option<Sort> {
        self.vars.iter().rev().find(|(n, _)| &**n == name).map(|p| p.1)
    }

    fn fun(&self, name: &str) -> Option<FunSig> {
        self.macros
            .iter()
            .find(|m| &*m.name == name)
            .map(Macro::sig)
            .or_else(|| self.targets.iter().find(|t| &*t.name == name).map(SynthTarget::sig))
    }

    fn op(&self, name: &str, pos: Pos) -> Result<Op, FrontendError> {
        let op = Op::from_name(name).ok_or_else(|| parse_err(pos, format!("unknown function `{name}`")))?;
        if !self.logic.supports(op.theory()) {
            return Err(parse_err(pos, format!("operator `{name}` is not part of logic {}", self.logic)));
        }
        Ok(op)
    }

    fn atom(&self, a: &Atom, pos: Pos) -> Result<Term, FrontendError> {
        Ok(match a {
            Atom::Int(n) => Term::lit(Value::Int(n.clone())),
            Atom::Str(s) => Term::lit(Value::str(s)),
            Atom::Hex(h) => Term::lit(bv_literal(h, 16, 4, pos)?),
            Atom::Bin(b) => Term::lit(bv_literal(b, 2, 1, pos)?),
            Atom::Symbol(s) => match s.as_str() {
                "true" => Term::bool(true),
                "false" => Term::bool(false),
                _ => {
                    if let Some(sort) = self.var(s) {
                        Term::var(s.as_str(), sort)
                    } else if let Some(sig) = self.fun(s) {
                        Term::call(&sig, vec![]).map_err(|e| sort_err(pos, e.0))?
                    } else {
                        return Err(parse_err(pos, format!("unknown symbol `{s}`")));
                    }
                }
            },
        })
    }

    /// `(_ bvN W)`
    fn indexed(&self, items: &[SExpr], pos: Pos) -> Result<Term, FrontendError> {
        if let [_, name, w] = items {
            if let (Some(n), Some(w)) = (name.symbol().and_then(|s| s.strip_prefix("bv")), numeral(w)) {
                let w = u32::try_from(w).ok().and_then(Sort::bv);
                if let (Ok(n), Some(Sort::BitVec(w))) = (n.parse::<BigInt>(), w) {
                    let bits = (n % (BigInt::from(1u8) << w)).to_u64().expect("reduced below 2^64");
                    return Ok(Term::lit(Value::bv(w, bits)));
                }
            }
        }
        Err(parse_err(pos, format!("unsupported indexed expression `{}`", SExpr::List(items.to_vec(), pos))))
    }

    fn term(&mut self, e: &SExpr) -> Result<Term, FrontendError> {
        let pos = e.pos();
        let items = match e {
            SExpr::Atom(a, _) => return self.atom(a, pos),
            SExpr::List(items, _) => items,
        };
        let Some((head, rest)) = items.split_first() else {
            return Err(parse_err(pos, "empty application"));
        };
        let name = head.symbol().ok_or_else(|| parse_err(head.pos(), format!("bad function head `{head}`")))?;
        match name {
            "let" => return self.let_term(rest, pos),
            "_" => return self.indexed(items, pos),
            _ => {}
        }
        let args = rest.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        if let Some(sig) = self.fun(name) {
            return Term::call(&sig, args).map_err(|e| sort_err(pos, e.0));
        }
        let op = self.op(name, head.pos())?;
        Term::app(op, args).map_err(|e| sort_err(pos, e.0))
    }

    fn let_term(&mut self, rest: &[SExpr], pos: Pos) -> Result<Term, FrontendError> {
        let [binds, body] = rest else {
            return Err(parse_err(pos, "`let` expects bindings and a body"));
        };
        let mut bound = Vec::new();
        for b in list(binds, "let bindings")? {
            match b.list() {
                Some([v, e]) => bound.push((symbol(v, "bound variable")?, self.term(e)?)),
                _ => return Err(parse_err(b.pos(), format!("bad let binding `{b}`"))),
            }
        }
        let depth = self.vars.len();
        self.vars.extend(bound.iter().map(|(v, t)| (v.clone(), t.sort())));
        let body = self.term(body);
        self.vars.truncate(depth);
        Ok(Term::let_in(bound, body?))
    }

    fn gterm(&mut self, e: &SExpr, nts: &[Nonterminal]) -> Result<GTerm, FrontendError> {
        let pos = e.pos();
        match e {
            SExpr::Atom(Atom::Symbol(s), _) => {
                if let Some(i) = nts.iter().position(|n| &*n.name == s) {
                    return Ok(GTerm::Nt(i));
                }
                Ok(GTerm::Leaf(self.term(e)?))
            }
            SExpr::Atom(..) => Ok(GTerm::Leaf(self.term(e)?)),
            SExpr::List(items, _) => {
                let Some((head, rest)) = items.split_first() else {
                    return Err(parse_err(pos, "empty production"));
                };
                let name = head.symbol().ok_or_else(|| parse_err(head.pos(), format!("bad production `{e}`")))?;
                match name {
                    "_" => return Ok(GTerm::Leaf(self.indexed(items, pos)?)),
                    "let" | "Constant" | "Variable" | "InputVariable" | "LocalVariable" => {
                        return Err(parse_err(pos, format!("unsupported grammar production `{name}`")));
                    }
                    _ => {}
                }
                let args = rest.iter().map(|a| self.gterm(a, nts)).collect::<Result<Vec<_>, _>>()?;
                let g = if let Some(m) = self.macros.iter().find(|m| &*m.name == name) {
                    GTerm::call(&m.sig(), args, nts)
                } else {
                    GTerm::theory(self.op(name, head.pos())?, args, nts)
                };
                g.map_err(|err| sort_err(pos, err.to_string()))
            }
        }
    }

    /// `((Start Int (x 0 (+ Start Start))) ...)`. The start symbol is the
    /// nonterminal named `Start`, else the first one.
    fn grammar(&mut self, e: &SExpr) -> Result<Grammar, FrontendError> {
        let decls = list(e, "grammar")?;
        let mut nts = Vec::new();
        for d in decls {
            match d.list() {
                Some([n, s, _]) => nts.push(Nonterminal { name: symbol(n, "nonterminal")?, sort: parse_sort(s)? }),
                _ => return Err(parse_err(d.pos(), "expected `(Name Sort (productions...))`")),
            }
        }
        let mut prods = Vec::new();
        for d in decls {
            let rules = list(&d.list().expect("checked above")[2], "production list")?;
            prods.push(rules.iter().map(|r| self.gterm(r, &nts)).collect::<Result<Vec<_>, _>>()?);
        }
        let start = nts.iter().position(|n| &*n.name == "Start").unwrap_or(0);
        Grammar::new(nts, start, prods).map_err(|err| parse_err(e.pos(), err.to_string()))
    }
}

fn expect_args<'a>(items: &'a [SExpr], n: usize, pos: Pos, usage: &str) -> Result<&'a [SExpr], FrontendError> {
    if items.len() != n + 1 {
        return Err(parse_err(pos, format!("expected `{usage}`")));
    }
    Ok(&items[1..])
}

/// The benchmark corpus contains `(constraint (or A) B)`; extra arguments
/// after a variadic connective are folded into it.
fn repair_constraint(items: &[SExpr], pos: Pos) -> Option<SExpr> {
    let [_, first, extra @ ..] = items else { return None };
    let inner = first.list()?;
    if extra.is_empty() || !matches!(inner.first()?.symbol()?, "or" | "and") {
        return None;
    }
    let mut joined = inner.to_vec();
    joined.extend_from_slice(extra);
    Some(SExpr::List(joined, pos))
}

struct Builder {
    problem: Option<Problem>,
    done: bool,
}

impl Builder {
    fn problem(&mut self, pos: Pos) -> Result<&mut Problem, FrontendError> {
        self.problem.as_mut().ok_or_else(|| parse_err(pos, "`set-logic` must come first"))
    }

    fn command(&mut self, cmd: &SExpr) -> Result<(), FrontendError> {
        let pos = cmd.pos();
        let items = list(cmd, "command")?;
        let name = items.first().and_then(SExpr::symbol).ok_or_else(|| parse_err(pos, "expected a command"))?;
        if self.done {
            return Err(parse_err(pos, format!("`{name}` after `check-synth`")));
        }
        match name {
            "set-logic" => {
                let [l] = expect_args(items, 1, pos, "(set-logic L)")? else { unreachable!() };
                let l = symbol(l, "logic")?;
                if self.problem.is_some() {
                    return Err(parse_err(pos, "logic set twice"));
                }
                let logic: Logic = l.parse().map_err(FrontendError::UnsupportedLogic)?;
                self.problem = Some(Problem {
                    logic,
                    universals: vec![],
                    macros: vec![],
                    targets: vec![],
                    constraints: vec![],
                });
            }
            "define-fun" => {
                let [n, ps, ret, body] = expect_args(items, 4, pos, "(define-fun f ((x S)...) S body)")? else {
                    unreachable!()
                };
                let (name, params, ret) = (symbol(n, "function name")?, parse_params(ps)?, parse_sort(ret)?);
                let p = self.problem(pos)?;
                let body = Scope::new(p.logic, &p.macros, &[], &params).term(body)?;
                if body.sort() != ret {
                    return Err(sort_err(pos, format!("body of `{name}` has sort {}, declared {ret}", body.sort())));
                }
                p.macros.push(Macro { name, params, ret, body });
            }
            "synth-fun" | "synth-inv" => {
                let inv = name == "synth-inv";
                let fixed = if inv { 3 } else { 4 };
                if items.len() != fixed && items.len() != fixed + 1 {
                    return Err(parse_err(pos, format!("malformed `{name}`")));
                }
                let name = symbol(&items[1], "function name")?;
                let params = parse_params(&items[2])?;
                let ret = if inv { Sort::Bool } else { parse_sort(&items[3])? };
                let p = self.problem(pos)?;
                let grammar = match items.get(fixed) {
                    Some(g) => TargetGrammar::Explicit(Scope::new(p.logic, &p.macros, &[], &params).grammar(g)?),
                    None => TargetGrammar::Default(default_grammar(p.logic, &params, ret)?),
                };
                p.targets.push(SynthTarget { name, params, ret, grammar });
            }
            "declare-var" | "declare-primed-var" => {
                let [v, s] = expect_args(items, 2, pos, "(declare-var x S)")? else { unreachable!() };
                let (v, s) = (symbol(v, "variable name")?, parse_sort(s)?);
                let p = self.problem(pos)?;
                if name == "declare-primed-var" {
                    let primed: Symbol = format!("{v}!").into();
                    p.universals.push((v, s));
                    p.universals.push((primed, s));
                } else {
                    p.universals.push((v, s));
                }
            }
            "constraint" => {
                let repaired = repair_constraint(items, items[1..].first().map_or(pos, SExpr::pos));
                let body = match &repaired {
                    Some(r) => r,
                    None => &expect_args(items, 1, pos, "(constraint t)")?[0],
                };
                let p = self.problem(pos)?;
                let t = Scope::new(p.logic, &p.macros, &p.targets, &p.universals).term(body)?;
                if t.sort() != Sort::Bool {
                    return Err(sort_err(body.pos(), format!("constraint has sort {}", t.sort())));
                }
                p.constraints.push(t);
            }
            "inv-constraint" => {
                let args = expect_args(items, 4, pos, "(inv-constraint inv pre trans post)")?;
                let names = args.iter().map(|a| symbol(a, "function name")).collect::<Result<Vec<_>, _>>()?;
                let p = self.problem.take().ok_or_else(|| parse_err(pos, "`set-logic` must come first"))?;
                let inv = p
                    .target(&names[0])
                    .ok_or_else(|| FrontendError::Desugar(format!("`{}` is not a synthesis target", names[0])))?;
                let spec = InvariantSpec {
                    inv: names[0].clone(),
                    state_vars: inv.params.clone(),
                    pre: names[1].clone(),
                    trans: names[2].clone(),
                    post: names[3].clone(),
                };
                self.problem = Some(desugar_invariant(&spec, p)?);
            }
            "check-synth" => {
                expect_args(items, 0, pos, "(check-synth)")?;
                self.problem(pos)?;
                self.done = true;
            }
            other => return Err(parse_err(pos, format!("unsupported command `{other}`"))),
        }
        Ok(())
    }
}

fn end_pos(text: &str) -> Pos {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Pos { line, col }
}

/// Reads a SyGuS-IF benchmark. The result is validated.
pub fn parse(text: &str) -> Result<Problem, FrontendError> {
    let mut b = Builder { problem: None, done: false };
    for cmd in parse_sexprs(text)? {
        b.command(&cmd)?;
    }
    if !b.done {
        return Err(parse_err(end_pos(text), "missing `(check-synth)`"));
    }
    let p = b.problem.expect("check-synth requires a logic");
    p.validate()?;
    Ok(p)
}

/// Reads `define-fun` commands giving an implementation for every target of
/// `problem`. Bodies may use the problem's macros.
pub fn parse_solution(text: &str, problem: &Problem) -> Result<Solution, FrontendError> {
    let mut sol = Solution::new();
    for cmd in parse_sexprs(text)? {
        let pos = cmd.pos();
        let items = list(&cmd, "define-fun")?;
        if items.first().and_then(SExpr::symbol) != Some("define-fun") {
            return Err(parse_err(pos, "expected `define-fun`"));
        }
        let [n, ps, ret, body] = expect_args(items, 4, pos, "(define-fun f ((x S)...) S body)")? else {
            unreachable!()
        };
        let name = symbol(n, "function name")?;
        let target = problem.target(&name).ok_or_else(|| parse_err(n.pos(), format!("`{name}` is not a target")))?;
        let params = parse_params(ps)?;
        let ret = parse_sort(ret)?;
        let sorts: Vec<Sort> = params.iter().map(|p| p.1).collect();
        if sorts != target.sig().params || ret != target.ret {
            return Err(sort_err(pos, format!("signature of `{name}` differs from its declaration")));
        }
        let body = Scope::new(problem.logic, &problem.macros, &[], &params).term(body)?;
        if body.sort() != ret {
            return Err(sort_err(pos, format!("body of `{name}` has sort {}, declared {ret}", body.sort())));
        }
        sol.insert(name, Definition { params, body });
    }
    if let Some(t) = problem.targets.iter().find(|t| !sol.contains_key(&t.name)) {
        return Err(parse_err(end_pos(text), format!("no definition for `{}`", t.name)));
    }
    Ok(sol)
}

/// Reads one term over `vars`, resolving macros and targets of `problem`.
pub fn parse_term(text: &str, problem: &Problem, vars: &[(Symbol, Sort)]) -> Result<Term, FrontendError> {
    match parse_sexprs(text)?.as_slice() {
        [e] => Scope::new(problem.logic, &problem.macros, &problem.targets, vars).term(e),
        _ => Err(parse_err(Pos { line: 1, col: 1 }, "expected exactly one term")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::TermKind;

    const ABS: &str = "(set-logic LIA)
(synth-fun abs ((x Int)) Int)
(declare-var x Int)
(constraint (>= (abs x) 0))
(constraint (or (= x (abs x)) (= (- x) (abs x))))
(check-synth)";

    #[test]
    fn abs_benchmark() {
        let p = parse(ABS).unwrap();
        assert_eq!(p.logic, Logic::Lia);
        assert_eq!(p.universals, vec![("x".into(), Sort::Int)]);
        assert_eq!(p.targets.len(), 1);
        assert!(p.targets[0].has_default_grammar());
        assert_eq!(p.constraints.len(), 2);
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        assert!(matches!(parse(""), Err(FrontendError::Parse { .. })));
        assert!(matches!(parse("(set-logic LIA)"), Err(FrontendError::Parse { .. })));
    }

    #[test]
    fn unknown_logic_fails() {
        assert_eq!(parse("(set-logic NRA)\n(check-synth)"), Err(FrontendError::UnsupportedLogic("NRA".into())));
    }

    #[test]
    fn ill_sorted_constraint() {
        let text = "(set-logic LIA)\n(declare-var x Int)\n(constraint (+ x true))\n(check-synth)";
        assert!(matches!(parse(text), Err(FrontendError::Sort { line: 3, .. })));
        let text = "(set-logic LIA)\n(declare-var x Int)\n(constraint (+ x 1))\n(check-synth)";
        assert!(matches!(parse(text), Err(FrontendError::Sort { .. })));
    }

    #[test]
    fn operators_outside_the_logic_are_rejected() {
        let text = "(set-logic LIA)\n(declare-var x Int)\n(constraint (= (str.len \"a\") x))\n(check-synth)";
        assert!(matches!(parse(text), Err(FrontendError::Parse { line: 3, .. })));
    }

    #[test]
    fn misplaced_paren_in_or_is_folded() {
        let text = "(set-logic LIA)
(synth-fun f ((x Int)) Int)
(declare-var x Int)
(constraint (or (< x 0)) (= (f x) x))
(check-synth)";
        let p = parse(text).unwrap();
        assert_eq!(p.constraints[0].to_string(), "(or (< x 0) (= (f x) x))");
    }

    #[test]
    fn grammar_with_macro_and_start_symbol() {
        let text = "(set-logic LIA)
(define-fun qm ((a Int) (b Int)) Int (ite (< a 0) b a))
(synth-fun g ((x Int)) Int ((Other Int (x)) (Start Int (Other (qm Start Start) 0))))
(declare-var x Int)
(constraint (= (g 0) 0))
(check-synth)";
        let p = parse(text).unwrap();
        let g = p.targets[0].grammar();
        assert_eq!(g.start(), 1);
        assert_eq!(g.productions(1).len(), 3);
        assert_eq!(g.production_bounds(), (1, 2));
    }

    #[test]
    fn lets_and_nullary_calls() {
        let text = "(set-logic LIA)
(synth-fun c () Int)
(constraint (let ((a (c)) (b c)) (= a b)))
(check-synth)";
        let p = parse(text).unwrap();
        assert!(matches!(p.constraints[0].kind(), TermKind::Let(..)));
        assert_eq!(p.constraints[0].to_string(), "(let ((a (c)) (b (c))) (= a b))");
    }

    #[test]
    fn solution_text() {
        let p = parse(ABS).unwrap();
        let sol = parse_solution("(define-fun abs ((x Int)) Int (ite (>= x 0) x (- 0 x)))", &p).unwrap();
        assert_eq!(sol["abs"].body.to_string(), "(ite (>= x 0) x (- 0 x))");
        assert!(parse_solution("(define-fun abs ((x Int)) Bool true)", &p).is_err());
        assert!(parse_solution("", &p).is_err());
    }

    #[test]
    fn bitvector_literals() {
        let text = "(set-logic BV)
(synth-fun f ((x (BitVec 64))) (BitVec 64) ((Start (BitVec 64) (x #x0000000000000001 (_ bv3 64)))))
(declare-var x (BitVec 64))
(constraint (= (f #x0000000000000000) #x0000000000000001))
(check-synth)";
        let p = parse(text).unwrap();
        let prods = p.targets[0].grammar().productions(0);
        assert_eq!(prods[2], GTerm::Leaf(Term::lit(Value::bv(64, 3))));
        let wide = text.replace("#x0000000000000000)", "#x00000000000000000)");
        assert!(matches!(parse(&wide), Err(FrontendError::Parse { .. })));
    }
}
