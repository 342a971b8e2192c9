//! Solver for recursion-free constrained Horn clauses over linear rational
//! arithmetic, with optional well-foundedness conditions.
//!
//! The pipeline resolves the clauses into ground implications, proves them
//! with an exact simplex that emits Farkas certificates, and reads the
//! interpretation of each unknown predicate off the certificates.
//! Well-foundedness conditions are first replaced by linear ranking
//! bounds. Every answer is re-verified by [`check`] before it is returned.

pub mod check;
pub mod encode;
pub mod error;
pub mod extract;
pub mod frontend;
pub mod graph;
pub mod limits;
pub mod logic;
pub mod lra;
pub mod qelim;
pub mod solver;
pub mod unfold;
pub mod wf;

pub use error::{Error, Result};
pub use limits::{Budget, Limits};
pub use logic::{
    AtomicConstraint, Atom, ClauseSystem, Conjunction, DnfFormula, Head, HornClause, LinearTerm,
    PredicateSymbol, Rational, Relation, Solution, Variable,
};
pub use solver::{solve, Options, Verdict};
