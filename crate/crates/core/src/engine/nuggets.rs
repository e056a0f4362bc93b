use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::Enumerator;
use super::{Budget, Failure};
use crate::ir::{substitute_vars, Grammar, Macro, Sort, Symbol, Term};
use crate::oracle::{check_conformance, Conformance};
use crate::semantics::Value;

/// Size-`k` terms of the start symbol whose values on `sample` differ from
/// those of every smaller term. Terms sharing a new value vector are all kept.
pub fn generate_nuggets(
    grammar: &Grammar,
    macros: &[Macro],
    params: &[(Symbol, Sort)],
    k: usize,
    sample: &[Vec<Value>],
    budget: &Budget,
) -> Result<Vec<Term>, Failure> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let start = grammar.start();
    let mut en = Enumerator::new(grammar, macros, params, sample.to_vec(), true);
    en.ensure_below(start, k, budget)?;
    let mut out = Vec::new();
    en.candidates(start, k, budget, &mut |this, e| {
        if !this.seen(start, &e.vals) {
            out.push(e.term);
        }
        Ok(false)
    })?;
    Ok(out)
}

/// Up to `count` distinct programs obtained by substituting one pool term for
/// `param` in another, keeping those within `max_size` that the grammar
/// accepts. Deterministic in `seed`.
pub fn compose_nuggets(
    grammar: &Grammar,
    param: &(Symbol, Sort),
    pool: &[Term],
    count: usize,
    max_size: usize,
    seed: u64,
) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Term> = Vec::new();
    if pool.is_empty() {
        return out;
    }
    let var = Term::var(param.0.clone(), param.1);
    for _ in 0..count.saturating_mul(200) {
        if out.len() == count {
            break;
        }
        let outer = pool.choose(&mut rng).expect("non-empty pool");
        let inner = pool.choose(&mut rng).expect("non-empty pool");
        let mut map = HashMap::new();
        map.insert(param.0.clone(), inner.clone());
        let t = if outer.free_vars().contains(&param.0) && rng.gen_bool(0.9) {
            substitute_vars(outer, &map)
        } else {
            outer.clone()
        };
        if t.size() <= max_size && t != var && !out.contains(&t) && check_conformance(&t, grammar) == Conformance::Valid {
            out.push(t);
        }
    }
    out
}

/// Structured 64-bit values followed by seeded random ones.
pub fn bv_sample(count: usize, seed: u64) -> Vec<u64> {
    let mut out = vec![0, 1, u64::MAX, 1 << 63, 0x5555_5555_5555_5555, 0xAAAA_AAAA_AAAA_AAAA, 0xFFFF, 0x1234_5678_9ABC_DEF0];
    out.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        out.push(rng.gen());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{GTerm, Nonterminal, Op};

    fn bvnot_grammar() -> Grammar {
        let nts = vec![Nonterminal { name: "S".into(), sort: Sort::BitVec(64) }];
        let not = GTerm::theory(Op::BvNot, vec![GTerm::Nt(0)], &nts).unwrap();
        Grammar::new(nts, 0, vec![vec![GTerm::Leaf(Term::var("x", Sort::BitVec(64))), not]]).unwrap()
    }

    fn sample() -> Vec<Vec<Value>> {
        bv_sample(6, 1).into_iter().map(|b| vec![Value::bv(64, b)]).collect()
    }

    #[test]
    fn double_negation_is_not_a_nugget() {
        let g = bvnot_grammar();
        let params = [("x".into(), Sort::BitVec(64))];
        let b = Budget::unlimited();
        let two = generate_nuggets(&g, &[], &params, 2, &sample(), &b).unwrap();
        assert_eq!(two.iter().map(|t| t.to_string()).collect::<Vec<_>>(), ["(bvnot x)"]);
        assert!(generate_nuggets(&g, &[], &params, 3, &sample(), &b).unwrap().is_empty());
    }

    #[test]
    fn composition_is_deterministic_and_conformant() {
        let g = bvnot_grammar();
        let p: (Symbol, Sort) = ("x".into(), Sort::BitVec(64));
        let pool = vec![Term::app(Op::BvNot, vec![Term::var("x", Sort::BitVec(64))]).unwrap()];
        let a = compose_nuggets(&g, &p, &pool, 3, 7, 9);
        assert_eq!(a, compose_nuggets(&g, &p, &pool, 3, 7, 9));
        assert!(a.iter().all(|t| check_conformance(t, &g) == Conformance::Valid && t.size() <= 7));
    }
}
