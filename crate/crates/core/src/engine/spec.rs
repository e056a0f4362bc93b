use std::collections::HashMap;

use crate::ir::{inline_lets, Definition, Func, Macro, Problem, Solution, Symbol, Term, TermKind};
use crate::semantics::{eval_in, truth, Defs, EvalError, FunEnv, Point, Value};

/// Splits a problem into groups of targets linked by shared constraints.
/// Each group keeps every universal and macro.
pub(crate) fn split(problem: &Problem) -> Vec<Problem> {
    let names = problem.target_names();
    if names.len() <= 1 {
        return vec![problem.clone()];
    }
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: Vec<Option<usize>> = Vec::new();
    for c in &problem.constraints {
        let used: Vec<usize> = c.user_funs().iter().filter_map(|f| names.iter().position(|n| n == f)).collect();
        for w in used.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a] = b;
        }
        owner.push(used.first().copied());
    }
    let mut groups: Vec<usize> = Vec::new();
    for i in 0..names.len() {
        let r = root(&mut parent, i);
        if !groups.contains(&r) {
            groups.push(r);
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mut p = problem.clone();
            p.targets.retain(|t| {
                let i = names.iter().position(|n| *n == t.name).expect("target name");
                root(&mut parent, i) == g
            });
            p.constraints = problem
                .constraints
                .iter()
                .zip(&owner)
                .filter(|(_, o)| o.is_some_and(|i| root(&mut parent, i) == g))
                .map(|(c, _)| c.clone())
                .collect();
            p
        })
        .collect()
}

/// Where and how the targets are called in the constraints.
pub(crate) struct Analysis {
    pub targets: Vec<Symbol>,
    pub constraints: Vec<Term>,
    /// Distinct argument tuples per target, in first-occurrence order.
    pub invocations: Vec<Vec<Vec<Term>>>,
    /// No invocation argument mentions a target.
    pub fixed: bool,
}

impl Analysis {
    pub fn new(problem: &Problem) -> Self {
        let targets = problem.target_names();
        let constraints: Vec<Term> = problem.constraints.iter().map(inline_lets).collect();
        let mut invocations = vec![Vec::new(); targets.len()];
        let mut fixed = true;
        for c in &constraints {
            c.visit(&mut |t| {
                if let TermKind::App(Func::User(f), args) = t.kind() {
                    if let Some(i) = targets.iter().position(|n| n == f) {
                        if args.iter().any(|a| targets.iter().any(|n| a.mentions_fun(n))) {
                            fixed = false;
                        }
                        if !invocations[i].contains(args) {
                            invocations[i].push(args.clone());
                        }
                    }
                }
            });
        }
        Analysis { targets, constraints, invocations, fixed }
    }

    pub fn single_invocation(&self) -> bool {
        self.fixed && self.invocations.iter().all(|v| v.len() <= 1)
    }

    /// Argument values of each invocation of target `i` at `p`.
    pub fn inputs_at(&self, i: usize, p: &Point, macros: &[Macro]) -> Result<Vec<Vec<Value>>, EvalError> {
        let funs = Defs::macros(macros);
        self.invocations[i]
            .iter()
            .map(|args| args.iter().map(|a| eval_in(a, p, &funs)).collect())
            .collect()
    }

    /// Truth of every constraint at `p`, with target calls answered by `lookup`.
    pub fn holds(
        &self,
        p: &Point,
        macros: &[Macro],
        lookup: &dyn Fn(usize, &[Value]) -> Option<Value>,
    ) -> Result<bool, EvalError> {
        let env = TableEnv { macros, targets: &self.targets, lookup };
        for c in &self.constraints {
            if !truth(&eval_in(c, p, &env)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Macros by definition, targets by table lookup.
pub(crate) struct TableEnv<'a> {
    pub macros: &'a [Macro],
    pub targets: &'a [Symbol],
    pub lookup: &'a dyn Fn(usize, &[Value]) -> Option<Value>,
}

impl FunEnv for TableEnv<'_> {
    fn call(&self, name: &str, args: &[Value], depth: usize) -> Result<Value, EvalError> {
        match self.targets.iter().position(|t| &**t == name) {
            Some(i) => (self.lookup)(i, args).ok_or_else(|| EvalError::UnknownFunction(name.to_string())),
            None => Defs::macros(self.macros).call(name, args, depth),
        }
    }
}

/// Distinct input tuples across points, plus for every point the indices of
/// its invocations' tuples.
pub(crate) struct InputTable {
    pub inputs: Vec<Vec<Value>>,
    pub index: HashMap<Vec<Value>, usize>,
    pub per_point: Vec<Vec<usize>>,
}

impl InputTable {
    pub fn build(a: &Analysis, target: usize, points: &[Point], macros: &[Macro]) -> Result<Self, EvalError> {
        let mut t = InputTable { inputs: Vec::new(), index: HashMap::new(), per_point: Vec::new() };
        for p in points {
            let mut ids = Vec::new();
            for tuple in a.inputs_at(target, p, macros)? {
                let n = t.inputs.len();
                let id = *t.index.entry(tuple.clone()).or_insert(n);
                if id == n {
                    t.inputs.push(tuple);
                }
                ids.push(id);
            }
            t.per_point.push(ids);
        }
        Ok(t)
    }
}

pub(crate) fn definition(problem: &Problem, target: usize, body: Term) -> Definition {
    Definition { params: problem.targets[target].params.clone(), body }
}

pub(crate) fn single(problem: &Problem, target: usize, body: Term) -> Solution {
    let mut s = Solution::new();
    s.insert(problem.targets[target].name.clone(), definition(problem, target, body));
    s
}
