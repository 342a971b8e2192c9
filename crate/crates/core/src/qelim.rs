//! Existential quantifier elimination by Fourier–Motzkin.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::limits::Budget;
use crate::logic::{AtomicConstraint, Conjunction, DnfFormula, LinearTerm, Relation, Variable};
use crate::lra::{check_constraints, check_sat, check_valid_constraints};

/// `∃ vars. f`, disjunct by disjunct, under the default limits.
pub fn eliminate(f: &DnfFormula, vars: &BTreeSet<Variable>) -> Result<DnfFormula> {
    eliminate_with(f, vars, &Budget::default())
}

pub fn eliminate_with(
    f: &DnfFormula,
    vars: &BTreeSet<Variable>,
    budget: &Budget,
) -> Result<DnfFormula> {
    let mut out = Vec::with_capacity(f.disjuncts().len());
    for d in f.disjuncts() {
        if let Some(c) = eliminate_conjunction(d, vars, budget)? {
            out.push(c);
        }
    }
    Ok(DnfFormula::new(out))
}

/// `∃ vars. c`; `None` when `c` is unsatisfiable.
pub fn eliminate_conjunction(
    c: &Conjunction,
    vars: &BTreeSet<Variable>,
    budget: &Budget,
) -> Result<Option<Conjunction>> {
    if !check_sat(c).is_sat() {
        return Ok(None);
    }
    let mut current: Vec<AtomicConstraint> = c.constraints().to_vec();
    if vars.is_empty() || !current.iter().any(|a| vars.iter().any(|v| a.mentions(v))) {
        return Ok(Some(c.clone()));
    }

    // equalities first: solve for the lowest eliminable variable and substitute
    loop {
        let pick = current.iter().enumerate().find_map(|(i, a)| {
            if a.relation() != Relation::Eq {
                return None;
            }
            a.term().vars().find(|v| vars.contains(v)).map(|v| (i, v.clone()))
        });
        let Some((i, v)) = pick else { break };
        let eqn = current.remove(i);
        let k = eqn.term().coeff(&v);
        // v = -(rest)/k
        let mut rest = eqn.term().clone();
        rest.add_coeff(v.clone(), -k.clone());
        let replacement = rest.scaled(&(-k.recip()));
        current = Conjunction::new(current.iter().map(|a| a.substitute(&v, &replacement)))
            .into_iter()
            .collect();
    }

    loop {
        budget.check_time()?;
        let Some(v) = choose_variable(&current, vars) else {
            break;
        };
        let mut keep = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for a in current {
            let k = a.term().coeff(&v);
            if k.is_zero() {
                keep.push(a);
            } else if k.is_positive() {
                lower.push(a);
            } else {
                upper.push(a);
            }
        }
        let produced = keep.len() + lower.len() * upper.len();
        if produced > budget.limits().max_fm_constraints {
            return Err(Error::ResourceLimit(format!(
                "Fourier-Motzkin step would produce {} constraints (limit {})",
                produced,
                budget.limits().max_fm_constraints
            )));
        }
        for lo in &lower {
            for up in &upper {
                keep.push(combine(lo, up, &v));
            }
        }
        let merged = Conjunction::new(keep);
        if merged.is_syntactically_false() {
            return Ok(None);
        }
        current = remove_redundant(merged.constraints());
    }
    Ok(Some(Conjunction::new(current)))
}

/// Eliminable variable minimizing `#lower × #upper`, ties to the lowest index.
fn choose_variable(current: &[AtomicConstraint], vars: &BTreeSet<Variable>) -> Option<Variable> {
    let mut best: Option<(usize, Variable)> = None;
    for v in vars {
        let (mut lo, mut up) = (0usize, 0usize);
        for a in current {
            let k = a.term().coeff(v);
            if k.is_positive() {
                lo += 1;
            } else if k.is_negative() {
                up += 1;
            }
        }
        if lo + up == 0 {
            continue;
        }
        let cost = lo * up;
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, v.clone()));
        }
    }
    best.map(|(_, v)| v)
}

/// Positive combination of a lower and an upper bound on `v` cancelling `v`.
fn combine(lower: &AtomicConstraint, upper: &AtomicConstraint, v: &Variable) -> AtomicConstraint {
    let a = lower.term().coeff(v);
    let b = -upper.term().coeff(v);
    let mut sum: LinearTerm = lower.term().scaled(&b);
    sum.add_assign_scaled(upper.term(), &a);
    let rel = if lower.is_strict() || upper.is_strict() {
        Relation::Gt
    } else {
        Relation::Ge
    };
    AtomicConstraint::new(sum, rel)
}

/// Drops, in order, every constraint implied by the ones still kept.
pub fn remove_redundant(constraints: &[AtomicConstraint]) -> Vec<AtomicConstraint> {
    let mut kept: Vec<AtomicConstraint> = constraints.to_vec();
    if !check_constraints(&kept).is_sat() {
        return kept;
    }
    let mut i = 0;
    while i < kept.len() {
        let candidate = kept.remove(i);
        let head = DnfFormula::from_constraints([candidate.clone()]);
        if !check_valid_constraints(&kept, &head).is_valid() {
            kept.insert(i, candidate);
            i += 1;
        }
    }
    kept
}
