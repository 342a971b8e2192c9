#![allow(dead_code)]

use hornsolve::check::{check_solution, least_solution};
use hornsolve::frontend::{parse_solution, parse_system, SourceFormat};
use hornsolve::unfold::{derivation_count, prune_underivable};
use hornsolve::logic::{rat, Atom, AtomicConstraint, Conjunction, DnfFormula, Head, LinearTerm};
use hornsolve::{ClauseSystem, PredicateSymbol, Rational, Variable};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const WORKED: &str = "\
p(X) :- X >= 10.
q(V, W) :- p(U), W = U + V.
Z >= Y :- q(Y, Z), Y =< 0.
";

pub const WORKED_SOLUTION: &str = "\
p(X1) = X1 >= 10.
q(X1, X2) = X2 >= X1 + 10.
";

pub const WORKED_WF: &str = "\
p(X) :- X >= 10.
q(V, W) :- p(U), W = U + V.
r(Y, Z) :- q(Y, Z), Y =< 0.
wf(r(S, T)).
";

pub const WORKED_WF_SOLUTION: &str = "\
p(X1) = X1 >= 10.
q(X1, X2) = X2 >= X1 + 10.
r(X1, X2) = X1 =< 0, X2 >= X1 + 10.
";

pub fn native(text: &str) -> ClauseSystem {
    parse_system(text, SourceFormat::Native).unwrap()
}

/// One formula over the formals `X1..Xn`, written as a solution entry.
pub fn over_formals(text: &str) -> DnfFormula {
    let sol = parse_solution(&format!("f__{}.", text), SourceFormat::Native).unwrap();
    let f = sol.iter().next().unwrap().1.clone();
    f
}

/// Solvability through the least solution.
pub fn oracle_sat(system: &ClauseSystem) -> bool {
    let sol = least_solution(system).unwrap();
    check_solution(system, &sol).unwrap().is_verified()
}

pub fn var_term(v: &Variable) -> LinearTerm {
    LinearTerm::var(v.clone())
}

pub fn constant(n: i64) -> LinearTerm {
    LinearTerm::constant(rat(n))
}

/// Sizes of generated systems.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_predicates: usize,
    pub max_clauses: usize,
    pub max_vars: usize,
    pub max_coeff: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_predicates: 8,
            max_clauses: 15,
            max_vars: 6,
            max_coeff: 10,
        }
    }
}

fn coeff(rng: &mut StdRng, max: i64) -> i64 {
    loop {
        let c = rng.gen_range(-max..=max);
        if c != 0 {
            return c;
        }
    }
}

/// Constants are drawn from `-spread..=spread`.
fn random_constraint(rng: &mut StdRng, pool: &[Variable], max: i64, spread: i64) -> AtomicConstraint {
    let n = rng.gen_range(1..=2.min(pool.len()));
    let mut term = LinearTerm::zero();
    for v in pool.choose_multiple(rng, n) {
        term.add_coeff(v.clone(), Rational::from_integer(coeff(rng, max).into()));
    }
    let k = constant(rng.gen_range(-spread..=spread));
    match rng.gen_range(0..20) {
        0..=11 => AtomicConstraint::ge(term, k),
        12..=16 => AtomicConstraint::gt(term, k),
        _ => AtomicConstraint::eq(term, k),
    }
}

fn random_conjunction(rng: &mut StdRng, pool: &[Variable], n: usize, max: i64, spread: i64) -> Conjunction {
    Conjunction::new((0..n).map(|_| random_constraint(rng, pool, max, spread)))
}

/// `t >= -k` with `k` up to the largest value `t` takes on the box, so that
/// boxed bodies often entail it.
fn query_constraint(rng: &mut StdRng, pool: &[Variable], max: i64) -> AtomicConstraint {
    let n = rng.gen_range(1..=2.min(pool.len()));
    let mut term = LinearTerm::zero();
    for v in pool.choose_multiple(rng, n) {
        term.add_coeff(v.clone(), rat(coeff(rng, max)));
    }
    let k = constant(-rng.gen_range(0..=2 * max * max));
    if rng.gen_bool(0.7) {
        AtomicConstraint::ge(term, k)
    } else {
        AtomicConstraint::gt(term, k)
    }
}

/// `-max =< v =< max` for every variable of the pool.
fn boxed(pool: &[Variable], max: i64) -> Conjunction {
    Conjunction::new(pool.iter().flat_map(|v| {
        [
            AtomicConstraint::ge(var_term(v), constant(-max)),
            AtomicConstraint::le(var_term(v), constant(max)),
        ]
    }))
}

/// [`random_system`] resampled until unfolding stays within `cap`
/// derivations; also returns the number of rejected samples.
pub fn random_system_within(rng: &mut StdRng, shape: Shape, cap: u128) -> (ClauseSystem, usize) {
    let mut rejected = 0;
    loop {
        let s = random_system(rng, shape);
        let (pruned, _) = prune_underivable(&s);
        if derivation_count(&pruned).unwrap() <= cap {
            return (s, rejected);
        }
        rejected += 1;
    }
}

/// A random recursion-free system without wf conditions. Predicate `i` only
/// depends on predicates `j < i`; every clause has at most `max_vars`
/// variables and at most two body atoms.
pub fn random_system(rng: &mut StdRng, shape: Shape) -> ClauseSystem {
    let mut s = ClauseSystem::new();
    let npred = rng.gen_range(1..=shape.max_predicates);
    let preds: Vec<PredicateSymbol> = (0..npred)
        .map(|i| s.declare(&format!("p{}", i), rng.gen_range(1..=3.min(shape.max_vars))))
        .collect();
    let nclauses = rng.gen_range((npred + 1).min(shape.max_clauses)..=shape.max_clauses);
    for k in 0..nclauses {
        // one defining clause per predicate first, then anything; the last is a query
        let head = if k < npred {
            Some(k)
        } else if k + 1 == nclauses || rng.gen_bool(0.15) {
            None
        } else {
            Some(rng.gen_range(0..npred))
        };
        let candidates: Vec<usize> = match head {
            Some(i) => (0..i).collect(),
            None => (0..npred).collect(),
        };
        let natoms = if candidates.is_empty() {
            0
        } else {
            let lo = usize::from(head.is_none());
            rng.gen_range(lo..=2)
        };
        let body_preds: Vec<usize> = (0..natoms)
            .map(|_| *candidates.choose(rng).unwrap())
            .collect();
        let widest = body_preds
            .iter()
            .chain(head.iter())
            .map(|&i| preds[i].arity())
            .max()
            .unwrap_or(1);
        let size = rng.gen_range(widest..=shape.max_vars);
        let pool: Vec<Variable> = (0..size).map(|i| s.fresh_var(&format!("V{}", i))).collect();
        let atom = |rng: &mut StdRng, p: &PredicateSymbol| {
            let args: Vec<Variable> = pool.choose_multiple(rng, p.arity()).cloned().collect();
            Atom::new(p.clone(), args).unwrap()
        };
        let atoms: Vec<Atom> = body_preds.iter().map(|&i| atom(rng, &preds[i])).collect();
        let nbody = rng.gen_range(0..=3);
        let mut body = random_conjunction(rng, &pool, nbody, shape.max_coeff, shape.max_coeff);
        if rng.gen_bool(0.5) {
            body = body.and(&boxed(&pool, shape.max_coeff));
        }
        let head = match head {
            Some(i) => Head::Atom(atom(rng, &preds[i])),
            None if rng.gen_bool(0.1) => Head::Formula(DnfFormula::falsity()),
            None => {
                let nd = rng.gen_range(1..=2);
                Head::Formula(DnfFormula::new((0..nd).map(|_| {
                    let n = rng.gen_range(1..=2);
                    Conjunction::new((0..n).map(|_| query_constraint(rng, &pool, shape.max_coeff)))
                })))
            }
        };
        s.add_clause(atoms, body, head).unwrap();
    }
    s
}

/// A conjunctive relation over `X1..Xk, X(k+1)..X2k` that terminates by
/// construction: one coordinate is bounded below and decreases by at least
/// one, the remaining constraints are random box or difference constraints.
pub fn random_terminating_relation(rng: &mut StdRng, k: usize) -> DnfFormula {
    let pre: Vec<Variable> = (0..k).map(Variable::formal).collect();
    let post: Vec<Variable> = (k..2 * k).map(Variable::formal).collect();
    let i = rng.gen_range(0..k);
    let c = rng.gen_range(1..=5);
    let mut cs = vec![
        AtomicConstraint::ge(var_term(&pre[i]), constant(rng.gen_range(-10..=10))),
        AtomicConstraint::le(var_term(&post[i]), var_term(&pre[i]).minus(&constant(c))),
    ];
    for _ in 0..rng.gen_range(0..=3) {
        let j = rng.gen_range(0..k);
        let bound = rng.gen_range(-10..=10);
        cs.push(match rng.gen_range(0..4) {
            0 => AtomicConstraint::ge(var_term(&pre[j]), constant(bound - 10)),
            1 => AtomicConstraint::le(var_term(&pre[j]), constant(bound + 10)),
            2 => AtomicConstraint::le(
                var_term(&post[j]),
                var_term(&pre[j]).plus(&constant(rng.gen_range(0..=3))),
            ),
            _ => {
                let mut t = LinearTerm::zero();
                t.add_coeff(pre[j].clone(), rat(coeff(rng, 10)));
                t.add_coeff(post[rng.gen_range(0..k)].clone(), rat(coeff(rng, 10)));
                AtomicConstraint::le(t, constant(bound.abs() + 10))
            }
        });
    }
    DnfFormula::from_constraints(cs)
}
