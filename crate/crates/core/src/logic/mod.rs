//! Terms, constraints, formulas and Horn clauses over linear rational
//! arithmetic.

mod clause;
mod formula;
mod term;

pub use clause::{
    substitute, Atom, ClauseSystem, Head, HornClause, Implication, PredicateSymbol, Solution,
    WfCondition,
};
pub use formula::{AtomicConstraint, Conjunction, DnfFormula, Relation};
pub use term::{rat, ratio, LinearTerm, Point, Rational, Renaming, Variable};

/// Canonical form of a constraint. Constraints are always stored normalized,
/// so this is a rebuild through the normalizing constructor.
pub fn normalize_constraint(c: &AtomicConstraint) -> AtomicConstraint {
    AtomicConstraint::new(c.term().clone(), c.relation())
}

/// Whether `f` holds at `point`. Every variable of `f` must be assigned.
pub fn evaluate(f: &DnfFormula, point: &Point) -> crate::Result<bool> {
    f.holds(point)
}
