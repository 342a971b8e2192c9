//! Independent verification of solutions and the exact least-solution oracle.
//!
//! Nothing here goes through unfolding or certificate extraction: the checker
//! substitutes and calls the simplex, the oracle projects clause bodies with
//! Fourier–Motzkin in dependency order.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::analyze;
use crate::limits::Budget;
use crate::logic::{substitute, ClauseSystem, DnfFormula, PredicateSymbol, Solution, Variable};
use crate::lra::{check_sat, check_valid, Model, Validity};
use crate::qelim::eliminate_with;
use crate::wf::{synthesize_ranking, Ranking};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Verified,
    /// The clause is not a valid implication; the model satisfies its body
    /// and falsifies its head after substitution.
    FailedClause { clause: usize, model: Model },
    /// No linear ranking function certifies the predicate's definition.
    FailedWf { predicate: PredicateSymbol },
}

impl CheckOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, CheckOutcome::Verified)
    }
}

pub fn check_solution(system: &ClauseSystem, sol: &Solution) -> Result<CheckOutcome> {
    for p in system.predicates() {
        if sol.get(p).is_none() {
            return Err(Error::Input(format!("solution has no entry for {}", p)));
        }
    }
    for clause in system.clauses() {
        let imp = substitute(sol, clause)?;
        for d in imp.body.disjuncts() {
            if let Validity::Invalid(model) = check_valid(d, &imp.head) {
                return Ok(CheckOutcome::FailedClause {
                    clause: clause.id,
                    model,
                });
            }
        }
    }
    for w in system.wf_conditions() {
        let rel = sol.get(&w.predicate).unwrap();
        if let Ranking::NoLinearRanking = synthesize_ranking(rel, w.state_arity())? {
            return Ok(CheckOutcome::FailedWf {
                predicate: w.predicate.clone(),
            });
        }
    }
    Ok(CheckOutcome::Verified)
}

pub fn least_solution(system: &ClauseSystem) -> Result<Solution> {
    least_solution_with(system, &Budget::default())
}

/// Pointwise-least interpretation satisfying every clause with an atom head.
pub fn least_solution_with(system: &ClauseSystem, budget: &Budget) -> Result<Solution> {
    if !system.wf_conditions().is_empty() {
        return Err(Error::Input(
            "least solution is only defined without well-foundedness conditions".into(),
        ));
    }
    let info = analyze(system)?;
    let mut sol = Solution::new();
    for p in &info.topo_order {
        let mut acc = DnfFormula::falsity();
        for clause in system.head_clauses(p) {
            let head = clause.head.atom().unwrap();
            let mut body = DnfFormula::from_conjunction(clause.body.clone());
            for a in &clause.body_atoms {
                body = body.and(&sol.instantiate(a)?);
                if body.is_false() {
                    break;
                }
            }
            let keep: BTreeSet<&Variable> = head.args().iter().collect();
            let hidden: BTreeSet<Variable> = clause
                .vars()
                .into_iter()
                .filter(|v| !keep.contains(v))
                .collect();
            let projected = eliminate_with(&body, &hidden, budget)?;
            acc = acc.or(&projected.rename(&head.to_formals()));
        }
        sol.insert(p.clone(), simplify(&acc))?;
    }
    Ok(sol)
}

/// Drops unsatisfiable disjuncts and disjuncts implied by another one.
pub fn simplify(f: &DnfFormula) -> DnfFormula {
    let live: Vec<_> = f
        .disjuncts()
        .iter()
        .filter(|d| check_sat(d).is_sat())
        .cloned()
        .collect();
    let mut kept: Vec<crate::logic::Conjunction> = Vec::new();
    for (i, d) in live.iter().enumerate() {
        let subsumed = live.iter().enumerate().any(|(j, e)| {
            if i == j {
                return false;
            }
            let implied = check_valid(d, &DnfFormula::from_conjunction(e.clone())).is_valid();
            // of two equivalent disjuncts keep the first
            implied && (j < i || !check_valid(e, &DnfFormula::from_conjunction(d.clone())).is_valid())
        });
        if !subsumed {
            kept.push(d.clone());
        }
    }
    DnfFormula::new(kept)
}
