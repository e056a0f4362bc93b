use super::FrontendError;
use crate::ir::{GTerm, Grammar, Logic, Nonterminal, Op, Sort, Symbol, Term};

/// The linear integer arithmetic grammar used when a target declares none:
/// an Int nonterminal over the Int parameters, `0`, `1`, `+`, `-` and `ite`,
/// and a Bool nonterminal over the Bool parameters, connectives and integer
/// comparisons. The nonterminal of the return sort is named `Start`.
pub fn default_grammar(logic: Logic, params: &[(Symbol, Sort)], ret: Sort) -> Result<Grammar, FrontendError> {
    if logic != Logic::Lia {
        return Err(FrontendError::UnsupportedDefaultGrammar(logic));
    }
    let (int, boolean) = match ret {
        Sort::Int => (0, 1),
        Sort::Bool => (1, 0),
        _ => return Err(FrontendError::UnsupportedDefaultGrammar(logic)),
    };
    let mut nts = vec![Nonterminal { name: "".into(), sort: Sort::Int }; 2];
    nts[int] = Nonterminal { name: if int == 0 { "Start" } else { "StartInt" }.into(), sort: Sort::Int };
    nts[boolean] = Nonterminal { name: if boolean == 0 { "Start" } else { "StartBool" }.into(), sort: Sort::Bool };

    let vars = |sort: Sort| {
        params.iter().filter(move |p| p.1 == sort).map(|(n, s)| GTerm::Leaf(Term::var(n.clone(), *s)))
    };
    let app = |op: Op, args: &[usize]| {
        GTerm::theory(op, args.iter().map(|&i| GTerm::Nt(i)).collect(), &nts).expect("well-sorted default production")
    };

    let mut int_prods: Vec<GTerm> = vars(Sort::Int).collect();
    int_prods.push(GTerm::Leaf(Term::int(0)));
    int_prods.push(GTerm::Leaf(Term::int(1)));
    int_prods.push(app(Op::Add, &[int, int]));
    int_prods.push(app(Op::Sub, &[int, int]));
    int_prods.push(app(Op::Ite, &[boolean, int, int]));

    let mut bool_prods: Vec<GTerm> = vars(Sort::Bool).collect();
    bool_prods.push(app(Op::And, &[boolean, boolean]));
    bool_prods.push(app(Op::Or, &[boolean, boolean]));
    bool_prods.push(app(Op::Not, &[boolean]));
    for op in [Op::Eq, Op::Lt, Op::Le, Op::Gt, Op::Ge] {
        bool_prods.push(app(op, &[int, int]));
    }

    let mut prods = vec![Vec::new(), Vec::new()];
    prods[int] = int_prods;
    prods[boolean] = bool_prods;
    Ok(Grammar::new(nts, 0, prods).expect("default grammar is well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_follows_return_sort() {
        let g = default_grammar(Logic::Lia, &[("x".into(), Sort::Int)], Sort::Bool).unwrap();
        assert_eq!(g.start_sort(), Sort::Bool);
        assert_eq!(&*g.nonterminal(g.start()).name, "Start");
        let g = default_grammar(Logic::Lia, &[], Sort::Int).unwrap();
        assert_eq!(g.start_sort(), Sort::Int);
        assert_eq!(g.productions(0).len(), 5);
    }

    #[test]
    fn other_logics_have_no_default() {
        assert_eq!(
            default_grammar(Logic::Slia, &[], Sort::String).unwrap_err(),
            FrontendError::UnsupportedDefaultGrammar(Logic::Slia)
        );
        assert!(default_grammar(Logic::Bv, &[], Sort::BitVec(64)).is_err());
    }
}
