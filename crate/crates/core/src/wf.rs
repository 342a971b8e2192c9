//! Replacing well-foundedness conditions by linear ranking bounds.
//!
//! For a condition on `r(pre, post)` the derivations of `r` are projected onto
//! its arguments, giving an under-approximation of the least `r`. A single
//! linear function `f` with `f(pre) ≥ b₀` and `f(pre) - f(post) ≥ 1` on every
//! disjunct is synthesized as an LP over Farkas multipliers, and the condition
//! becomes the query clause `r(pre, post) → f(pre) ≥ b₀ ∧ f(pre) - f(post) ≥ 1`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::analyze;
use crate::limits::Budget;
use crate::logic::{
    Atom, AtomicConstraint, ClauseSystem, Conjunction, DnfFormula, Head, LinearTerm,
    PredicateSymbol, Rational, Relation, Renaming, Variable,
};
use crate::lra::{check_constraints, check_sat, check_valid, SatResult};
use crate::qelim::{eliminate_conjunction, eliminate_with};
use crate::unfold::{prune_underivable, unfold_from, GroundHead, GroundImplication};

/// `f(pre) = Σ coefficients[i]·pre[i]` with `f(pre) ≥ bound` and
/// `f(pre) - f(post) ≥ decrease` on the ranked relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingWitness {
    pub coefficients: Vec<Rational>,
    pub bound: Rational,
    pub decrease: Rational,
}

impl RankingWitness {
    pub fn state_arity(&self) -> usize {
        self.coefficients.len()
    }

    /// `f` applied to the given variables.
    pub fn rank_term(&self, state: &[Variable]) -> LinearTerm {
        LinearTerm::from_parts(
            state.iter().cloned().zip(self.coefficients.iter().cloned()),
            Rational::zero(),
        )
    }

    pub fn rank(&self, state: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(state)
            .map(|(c, x)| c * x)
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// The bound and decrease conditions over the formals `X1 … X2k`.
    pub fn relation(&self) -> Conjunction {
        let k = self.state_arity();
        let pre: Vec<Variable> = (0..k).map(Variable::formal).collect();
        let post: Vec<Variable> = (k..2 * k).map(Variable::formal).collect();
        let f_pre = self.rank_term(&pre);
        let f_post = self.rank_term(&post);
        Conjunction::new([
            AtomicConstraint::ge(f_pre.clone(), LinearTerm::constant(self.bound.clone())),
            AtomicConstraint::ge(
                f_pre.minus(&f_post),
                LinearTerm::constant(self.decrease.clone()),
            ),
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ranking {
    Found(RankingWitness),
    /// No single linear ranking function exists. This does not mean the
    /// relation is not well-founded.
    NoLinearRanking,
}

/// `∃ non-arguments. body` over the formals of the head predicate.
pub fn project_underapprox(imp: &GroundImplication, budget: &Budget) -> Result<DnfFormula> {
    let GroundHead::Atom(head) = &imp.head else {
        return Err(Error::Input(
            "projection needs an implication with an atom head".into(),
        ));
    };
    let body = Conjunction::new(imp.body.iter().map(|t| t.constraint.clone()));
    let keep: BTreeSet<&Variable> = head.args().iter().collect();
    let hidden: BTreeSet<Variable> = body.vars().into_iter().filter(|v| !keep.contains(v)).collect();
    let projected = eliminate_with(&DnfFormula::from_conjunction(body), &hidden, budget)?;
    Ok(projected.rename(&head.to_formals()))
}

/// LP unknowns get their own index space.
struct LpVars {
    next: u32,
}

impl LpVars {
    fn fresh(&mut self, name: String) -> Variable {
        let v = Variable::new(self.next, name);
        self.next += 1;
        v
    }
}

/// Finds one linear ranking function for every disjunct of `rel`, a relation
/// over `X1 … X2k` with `k = state_arity`.
pub fn synthesize_ranking(rel: &DnfFormula, state_arity: usize) -> Result<Ranking> {
    let k = state_arity;
    if let Some(v) = rel.vars().into_iter().find(|v| v.index() as usize >= 2 * k) {
        return Err(Error::Input(format!(
            "relation mentions {} outside its {} parameters",
            v,
            2 * k
        )));
    }
    let live: Vec<&Conjunction> = rel
        .disjuncts()
        .iter()
        .filter(|d| check_sat(d).is_sat())
        .collect();
    if live.is_empty() {
        return Ok(Ranking::Found(RankingWitness {
            coefficients: vec![Rational::zero(); k],
            bound: Rational::zero(),
            decrease: Rational::one(),
        }));
    }

    let mut lp = LpVars { next: 0 };
    let coeffs: Vec<Variable> = (0..k).map(|j| lp.fresh(format!("c{j}"))).collect();
    let bound = lp.fresh("b".into());
    let mut rows: Vec<AtomicConstraint> = Vec::new();

    for (di, d) in live.iter().enumerate() {
        for decrease in [false, true] {
            let tag = if decrease { "mu" } else { "lambda" };
            let mut column: Vec<LinearTerm> = vec![LinearTerm::zero(); 2 * k];
            let mut constant = LinearTerm::zero();
            for (ci, c) in d.constraints().iter().enumerate() {
                let m = lp.fresh(format!("{tag}{di}_{ci}"));
                if c.relation() != Relation::Eq {
                    rows.push(AtomicConstraint::ge(LinearTerm::var(m.clone()), LinearTerm::zero()));
                }
                for (v, a) in c.term().coeffs() {
                    column[v.index() as usize].add_coeff(m.clone(), a.clone());
                }
                constant.add_coeff(m, c.term().constant_part().clone());
            }
            for (j, col) in column.into_iter().enumerate() {
                let target = if j < k {
                    LinearTerm::var(coeffs[j].clone())
                } else if decrease {
                    LinearTerm::var(coeffs[j - k].clone()).negated()
                } else {
                    LinearTerm::zero()
                };
                rows.push(AtomicConstraint::eq(col, target));
            }
            // Σ m·a ≤ -b₀ for the bound, Σ m·a ≤ -1 for the decrease
            let rhs = if decrease {
                LinearTerm::constant(-Rational::one())
            } else {
                LinearTerm::var(bound.clone()).negated()
            };
            rows.push(AtomicConstraint::le(constant, rhs));
        }
    }

    let model = match check_constraints(&rows) {
        SatResult::Unsat(_) => return Ok(Ranking::NoLinearRanking),
        SatResult::Sat(m) => m.assignment,
    };
    let raw: Vec<Rational> = coeffs
        .iter()
        .map(|c| model.get(c).cloned().unwrap_or_else(Rational::zero))
        .collect();

    let mut witness = tighten(&raw, &live)?;
    let relation = DnfFormula::from_conjunction(witness.relation());
    for d in &live {
        if !check_valid(d, &relation).is_valid() {
            return Err(Error::Internal(format!(
                "synthesized ranking function does not cover {}",
                d
            )));
        }
    }
    witness.decrease = Rational::one();
    Ok(Ranking::Found(witness))
}

/// Scales `f` to a primitive integer vector, then takes the exact greatest
/// bound and decrease over the relation, rescaling so the decrease is at
/// least one.
fn tighten(raw: &[Rational], live: &[&Conjunction]) -> Result<RankingWitness> {
    let k = raw.len();
    let lcm = raw
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = raw.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let coefficients: Vec<Rational> = ints
        .iter()
        .map(|c| Rational::new(c.clone(), gcd.clone()))
        .collect();

    let probe = RankingWitness {
        coefficients,
        bound: Rational::zero(),
        decrease: Rational::one(),
    };
    let pre: Vec<Variable> = (0..k).map(Variable::formal).collect();
    let post: Vec<Variable> = (k..2 * k).map(Variable::formal).collect();
    let f_pre = probe.rank_term(&pre);
    let step = f_pre.minus(&probe.rank_term(&post));
    let budget = Budget::unlimited();
    let mut bound: Option<Rational> = None;
    let mut decrease: Option<Rational> = None;
    for d in live {
        let b = infimum(d, &f_pre, 2 * k, &budget)?
            .ok_or_else(|| Error::Internal("ranking function is unbounded".into()))?;
        let s = infimum(d, &step, 2 * k, &budget)?
            .ok_or_else(|| Error::Internal("ranking decrease is unbounded".into()))?;
        bound = Some(bound.map_or(b.clone(), |x| x.min(b)));
        decrease = Some(decrease.map_or(s.clone(), |x| x.min(s)));
    }
    let (bound, decrease) = (bound.unwrap(), decrease.unwrap());
    if !decrease.is_positive() {
        return Err(Error::Internal("ranking decrease is not positive".into()));
    }
    if decrease >= Rational::one() {
        Ok(RankingWitness {
            bound,
            ..probe
        })
    } else {
        let scale = decrease.recip();
        Ok(RankingWitness {
            coefficients: probe.coefficients.iter().map(|c| c * &scale).collect(),
            bound: bound * &scale,
            decrease: Rational::one(),
        })
    }
}

/// Greatest lower bound of `term` over the satisfiable conjunction `c`, whose
/// variables have indices below `fresh`. `None` when unbounded below.
fn infimum(c: &Conjunction, term: &LinearTerm, fresh: usize, budget: &Budget) -> Result<Option<Rational>> {
    let y = Variable::new(fresh as u32, "y");
    let with_y = c.with(AtomicConstraint::eq(LinearTerm::var(y.clone()), term.clone()));
    let hidden: BTreeSet<Variable> = c.vars();
    let Some(projected) = eliminate_conjunction(&with_y, &hidden, budget)? else {
        return Ok(None);
    };
    let mut best: Option<Rational> = None;
    for a in projected.constraints() {
        let k = a.term().coeff(&y);
        if k.is_positive() || (a.relation() == Relation::Eq && !k.is_zero()) {
            let value = -(a.term().constant_part() / &k);
            best = Some(best.map_or(value.clone(), |b| b.max(value)));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub enum WfElimination {
    /// The system with every condition replaced by its ranking clause.
    Eliminated {
        system: ClauseSystem,
        witnesses: Vec<(PredicateSymbol, RankingWitness)>,
    },
    Unknown(String),
}

pub fn eliminate_wf(system: &ClauseSystem, budget: &Budget) -> Result<WfElimination> {
    if system.wf_conditions().is_empty() {
        return Ok(WfElimination::Eliminated {
            system: system.clone(),
            witnesses: Vec::new(),
        });
    }
    analyze(system)?;
    let (pruned, _) = prune_underivable(&system.without_wf());
    let mut out = system.clone();
    let mut witnesses = Vec::new();
    for w in system.wf_conditions() {
        let r = &w.predicate;
        let roots: Vec<usize> = pruned.head_clauses(r).map(|c| c.id).collect();
        let mut rel = DnfFormula::falsity();
        for d in unfold_from(&pruned, &roots, budget)? {
            rel = rel.or(&project_underapprox(&d.implication, budget)?);
        }
        let witness = match synthesize_ranking(&rel, w.state_arity())? {
            Ranking::Found(wit) => wit,
            Ranking::NoLinearRanking => {
                return Ok(WfElimination::Unknown(format!(
                    "no linear ranking function for {} over {}",
                    r, rel
                )))
            }
        };
        let params: Vec<Variable> = (0..r.arity())
            .map(|i| out.fresh_var(&format!("X{}", i + 1)))
            .collect();
        let atom = Atom::new(r.clone(), params.clone())?;
        let to_params: Renaming = atom.formal_renaming();
        let head = DnfFormula::from_conjunction(witness.relation().rename(&to_params));
        out.add_clause(vec![atom], Conjunction::truth(), Head::Formula(head))?;
        out.remove_wf(r);
        witnesses.push((r.clone(), witness));
    }
    Ok(WfElimination::Eliminated {
        system: out,
        witnesses,
    })
}
