//! Decision procedure for conjunctions of linear rational constraints.
//!
//! Satisfiable conjunctions come back with an exact rational model,
//! unsatisfiable ones with a Farkas certificate: weights on the constraints
//! (nonnegative on inequalities, any sign on equalities) whose weighted sum
//! has no variables left and a contradictory constant. No floating point is
//! involved anywhere.

mod delta;
mod simplex;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::logic::{AtomicConstraint, Conjunction, DnfFormula, LinearTerm, Point, Rational, Relation};

/// A satisfying assignment.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Model {
    pub assignment: Point,
}

/// Weights indexed by constraint position. Only nonzero weights are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FarkasCertificate {
    weights: BTreeMap<usize, Rational>,
}

impl FarkasCertificate {
    pub fn from_weights(weights: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        FarkasCertificate {
            weights: weights.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
        }
    }

    pub fn weights(&self) -> &BTreeMap<usize, Rational> {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> Rational {
        self.weights.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    /// The weighted sum of `constraints` and whether a strict constraint
    /// carries positive weight. `None` when an index is out of range or an
    /// inequality has negative weight.
    pub fn combine(&self, constraints: &[AtomicConstraint]) -> Option<(LinearTerm, bool)> {
        let mut sum = LinearTerm::zero();
        let mut strict = false;
        for (&i, w) in &self.weights {
            let c = constraints.get(i)?;
            if c.relation() != Relation::Eq && w.is_negative() {
                return None;
            }
            if c.relation() == Relation::Gt && w.is_positive() {
                strict = true;
            }
            sum.add_assign_scaled(c.term(), w);
        }
        Some((sum, strict))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat(FarkasCertificate),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

pub fn check_sat(c: &Conjunction) -> SatResult {
    check_constraints(c.constraints())
}

/// Like [`check_sat`] on a raw constraint list; certificate indices refer to
/// positions in `constraints`, duplicates included.
pub fn check_constraints(constraints: &[AtomicConstraint]) -> SatResult {
    match simplex::solve(constraints) {
        simplex::Outcome::Sat(assignment) => {
            debug_assert!(constraints
                .iter()
                .all(|c| c.holds(&assignment).unwrap_or(false)));
            SatResult::Sat(Model { assignment })
        }
        simplex::Outcome::Unsat(cert) => {
            debug_assert!(verify_certificate(constraints, &cert));
            SatResult::Unsat(cert)
        }
    }
}

/// Checks that `cert` proves `constraints` unsatisfiable.
pub fn verify_certificate(constraints: &[AtomicConstraint], cert: &FarkasCertificate) -> bool {
    match cert.combine(constraints) {
        None => false,
        Some((sum, strict)) => {
            if !sum.is_constant() {
                return false;
            }
            let k = sum.constant_part();
            k.is_negative() || (strict && k.is_zero())
        }
    }
}

/// One unsatisfiable branch of `body ∧ ¬head`: the negated head constraints
/// chosen on this branch and a certificate over `body ++ negated_head`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub negated_head: Vec<AtomicConstraint>,
    pub certificate: FarkasCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// Every branch of `body ∧ ¬head` is refuted.
    Valid(Vec<Refutation>),
    /// A model of `body ∧ ¬head`.
    Invalid(Model),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid(_))
    }
}

/// Decides `body → head` by refuting every branch of `body ∧ ¬head`.
pub fn check_valid(body: &Conjunction, head: &DnfFormula) -> Validity {
    check_valid_constraints(body.constraints(), head)
}

/// [`check_valid`] over a raw body list (indices in certificates refer to it).
///
/// The negated head is explored depth first, one head disjunct at a time; a
/// branch is closed as soon as its prefix is unsatisfiable, so the returned
/// refutations cover every full branch.
pub fn check_valid_constraints(body: &[AtomicConstraint], head: &DnfFormula) -> Validity {
    let mut refutations = Vec::new();
    let mut chosen = Vec::new();
    match refute(body, head.disjuncts(), &mut chosen, &mut refutations) {
        Some(model) => Validity::Invalid(model),
        None => Validity::Valid(refutations),
    }
}

fn refute(
    body: &[AtomicConstraint],
    pending: &[Conjunction],
    chosen: &mut Vec<AtomicConstraint>,
    out: &mut Vec<Refutation>,
) -> Option<Model> {
    let mut all = body.to_vec();
    all.extend(chosen.iter().cloned());
    match check_constraints(&all) {
        SatResult::Unsat(certificate) => {
            out.push(Refutation {
                negated_head: chosen.clone(),
                certificate,
            });
            None
        }
        SatResult::Sat(model) => {
            let Some((first, rest)) = pending.split_first() else {
                return Some(model);
            };
            for c in first.constraints() {
                for neg in c.negate() {
                    chosen.push(neg);
                    let found = refute(body, rest, chosen, out);
                    chosen.pop();
                    if found.is_some() {
                        return found;
                    }
                }
            }
            None
        }
    }
}

/// `a → b`
pub fn entails(a: &DnfFormula, b: &DnfFormula) -> bool {
    a.disjuncts().iter().all(|d| check_valid(d, b).is_valid())
}

pub fn equivalent(a: &DnfFormula, b: &DnfFormula) -> bool {
    entails(a, b) && entails(b, a)
}

pub fn is_satisfiable(f: &DnfFormula) -> bool {
    f.disjuncts().iter().any(|d| check_sat(d).is_sat())
}
