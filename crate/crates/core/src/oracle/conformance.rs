use std::collections::HashMap;

use crate::ir::{substitute_vars, GTerm, Grammar, Problem, Solution, Symbol, Term, TermKind};

/// Membership of a term in a grammar's language. `NonConformant` carries the
/// child-index path to the offending subterm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conformance {
    Valid,
    NonConformant(Vec<usize>),
}

struct Matcher<'g> {
    grammar: &'g Grammar,
    closures: Vec<Vec<usize>>,
    memo: HashMap<(usize, Term), bool>,
}

impl<'g> Matcher<'g> {
    fn new(grammar: &'g Grammar) -> Self {
        let closures = (0..grammar.len()).map(|i| grammar.unit_closure(i)).collect();
        Matcher { grammar, closures, memo: HashMap::new() }
    }

    fn non_unit(&self, nt: usize) -> impl Iterator<Item = &'g GTerm> + '_ {
        let g = self.grammar;
        self.closures[nt].iter().flat_map(move |&n| g.productions(n)).filter(|p| p.is_unit().is_none())
    }

    fn derives(&mut self, nt: usize, t: &Term) -> bool {
        if t.sort() != self.grammar.nonterminal(nt).sort {
            return false;
        }
        if let Some(&r) = self.memo.get(&(nt, t.clone())) {
            return r;
        }
        let prods: Vec<&GTerm> = self.non_unit(nt).collect();
        let r = prods.into_iter().any(|p| self.matches(p, t));
        self.memo.insert((nt, t.clone()), r);
        r
    }

    fn matches(&mut self, p: &GTerm, t: &Term) -> bool {
        match p {
            GTerm::Nt(i) => self.derives(*i, t),
            GTerm::Leaf(l) => l == t,
            GTerm::App { func, args, .. } => match t.kind() {
                TermKind::App(f, targs) if f == func && targs.len() == args.len() => {
                    args.iter().zip(targs).all(|(a, ta)| self.matches(a, ta))
                }
                _ => false,
            },
        }
    }

    /// Descends towards a subterm that no production can place.
    fn blame(&mut self, nt: usize, t: &Term, path: &mut Vec<usize>) {
        let TermKind::App(f, targs) = t.kind() else { return };
        let prods: Vec<&GTerm> = self.non_unit(nt).collect();
        for p in prods {
            let GTerm::App { func, args, .. } = p else { continue };
            if func != f || args.len() != targs.len() {
                continue;
            }
            if let Some(i) = (0..args.len()).find(|&i| !self.matches(&args[i], &targs[i])) {
                if let GTerm::Nt(child) = args[i] {
                    path.push(i);
                    self.blame(child, &targs[i], path);
                }
                return;
            }
        }
    }
}

pub fn check_conformance(term: &Term, grammar: &Grammar) -> Conformance {
    let mut m = Matcher::new(grammar);
    if m.derives(grammar.start(), term) {
        return Conformance::Valid;
    }
    let mut path = Vec::new();
    if term.sort() == grammar.start_sort() {
        m.blame(grammar.start(), term, &mut path);
    }
    Conformance::NonConformant(path)
}

/// Checks every target's body against its grammar, after renaming the
/// definition's parameters to the names the grammar uses.
pub fn check_solution_conformance(problem: &Problem, solution: &Solution) -> Result<(), (Symbol, Vec<usize>)> {
    for t in &problem.targets {
        let Some(def) = solution.get(&t.name) else {
            return Err((t.name.clone(), vec![]));
        };
        let renames: HashMap<Symbol, Term> = def
            .params
            .iter()
            .zip(&t.params)
            .filter(|(a, b)| a.0 != b.0)
            .map(|(a, b)| (a.0.clone(), Term::var(b.0.clone(), b.1)))
            .collect();
        let body = substitute_vars(&def.body, &renames);
        if let Conformance::NonConformant(path) = check_conformance(&body, t.grammar()) {
            return Err((t.name.clone(), path));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, parse_term};

    const QM_INNER: &str = "(set-logic LIA)
(define-fun qm ((a Int) (b Int)) Int (ite (< a 0) b a))
(synth-fun qm-loop ((x Int)) Int
  ((Start Int (x 0 1 3 7 (- Start Start) (+ Start Start) (qm Start Start)))))
(declare-var x Int)
(constraint (= (qm-loop 0) 7))
(check-synth)";

    #[test]
    fn qm_witness_and_rejections() {
        let p = parse(QM_INNER).unwrap();
        let g = p.targets[0].grammar();
        let vars = [("x".into(), crate::ir::Sort::Int)];
        let ok = parse_term("(qm (- x 1) 7)", &p, &vars).unwrap();
        assert_eq!(check_conformance(&ok, g), Conformance::Valid);
        assert_eq!(check_conformance(&Term::var("x", crate::ir::Sort::Int), g), Conformance::Valid);
        let bad = parse_term("(* x 2)", &p, &vars).unwrap();
        assert_eq!(check_conformance(&bad, g), Conformance::NonConformant(vec![]));
        let deep = parse_term("(qm (- x 2) 7)", &p, &vars).unwrap();
        assert_eq!(check_conformance(&deep, g), Conformance::NonConformant(vec![0, 1]));
    }

    #[test]
    fn unit_productions_are_followed() {
        let text = "(set-logic SLIA)
(synth-fun f ((s String)) String ((Start String (ntS)) (ntS String (s \" \" (str.++ ntS ntS)))))
(constraint (= (f \"a\") \"a\"))
(check-synth)";
        let p = parse(text).unwrap();
        let vars = [("s".into(), crate::ir::Sort::String)];
        let t = parse_term("(str.++ s (str.++ \" \" s))", &p, &vars).unwrap();
        assert_eq!(check_conformance(&t, p.targets[0].grammar()), Conformance::Valid);
    }
}
