//! The solving pipeline: analyze, eliminate wf conditions, unfold, prove,
//! extract, verify, and fall back to the least solution when the extracted
//! candidate fails verification.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::check::{check_solution, least_solution_with, CheckOutcome};
use crate::error::{Error, Result};
use crate::extract::extract_solution;
use crate::graph::{analyze, Shape};
use crate::limits::{Budget, Limits};
use crate::logic::{ClauseSystem, DnfFormula, PredicateSymbol, Rational, Solution, Variable};
use crate::lra::{check_valid_constraints, Model, Validity};
use crate::unfold::{prune_underivable, unfold, Derivation, GroundHead};
use crate::wf::{eliminate_wf, RankingWitness, WfElimination};

#[derive(Clone, Debug)]
pub struct Options {
    pub limits: Limits,
    /// Verify the extracted solution even when the system is tree-shaped.
    pub check: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            limits: Limits::default(),
            check: true,
        }
    }
}

/// A derivation whose ground implication is falsified by `model`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub derivation: Derivation,
    pub model: Model,
}

impl Counterexample {
    /// Body true and head false under the model.
    pub fn is_witnessed(&self) -> Result<bool> {
        let imp = &self.derivation.implication;
        let point = &self.model.assignment;
        for t in &imp.body {
            if !t.constraint.holds(point)? {
                return Ok(false);
            }
        }
        match &imp.head {
            GroundHead::Formula(f) => Ok(!f.holds(point)?),
            GroundHead::Atom(_) => Ok(false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Solvable(Solution),
    Unsolvable(Counterexample),
    Unknown(String),
}

impl Verdict {
    /// `sat`, `unsat` or `unknown`.
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Solvable(_) => "sat",
            Verdict::Unsolvable(_) => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub verdict: Verdict,
    /// The wf-free system the verdict refers to. Identical to the input when
    /// there were no wf conditions.
    pub transformed: ClauseSystem,
    pub witnesses: Vec<(PredicateSymbol, RankingWitness)>,
    pub derivations: usize,
    pub used_fallback: bool,
}

pub fn solve(system: &ClauseSystem, options: &Options) -> Result<Verdict> {
    solve_detailed(system, options).map(|r| r.verdict)
}

pub fn solve_detailed(system: &ClauseSystem, options: &Options) -> Result<SolveReport> {
    let budget = Budget::new(options.limits.clone());
    analyze(system)?;

    let (transformed, witnesses) = match eliminate_wf(system, &budget)? {
        WfElimination::Eliminated { system, witnesses } => (system, witnesses),
        WfElimination::Unknown(reason) => {
            return Ok(SolveReport {
                verdict: Verdict::Unknown(reason),
                transformed: system.clone(),
                witnesses: Vec::new(),
                derivations: 0,
                used_fallback: false,
            })
        }
    };
    let replacement_clauses: BTreeSet<usize> =
        (system.clauses().len()..transformed.clauses().len()).collect();

    let (pruned, dead) = prune_underivable(&transformed);
    let info = analyze(&pruned)?;
    let derivations = unfold(&pruned, &info, &budget)?;
    let mut report = SolveReport {
        verdict: Verdict::Unknown(String::new()),
        transformed: transformed.clone(),
        witnesses,
        derivations: derivations.len(),
        used_fallback: false,
    };

    let mut proved = Vec::with_capacity(derivations.len());
    for d in derivations {
        budget.check_time()?;
        let head = d
            .implication
            .head_formula()
            .ok_or_else(|| Error::Internal("query derivation with atom head".into()))?;
        match check_valid_constraints(&d.implication.body_constraints(), head) {
            Validity::Valid(refs) => proved.push((d, refs)),
            Validity::Invalid(model) => {
                if replacement_clauses.contains(&d.tree.root_clause()) {
                    report.verdict = Verdict::Unknown(
                        "ranking witness does not cover a derivation of its relation".into(),
                    );
                    return Ok(report);
                }
                let cex = Counterexample {
                    model: complete_model(model, &d),
                    derivation: d,
                };
                if !cex.is_witnessed()? {
                    return Err(Error::Internal("countermodel does not falsify its derivation".into()));
                }
                report.verdict = Verdict::Unsolvable(cex);
                return Ok(report);
            }
        }
    }

    let mut candidate = extract_solution(&pruned, &proved)?;
    let mut full = Solution::new();
    for p in transformed.predicates() {
        let f = if dead.contains(p) {
            DnfFormula::falsity()
        } else {
            candidate.get(p).cloned().unwrap_or_else(DnfFormula::truth)
        };
        full.insert(p.clone(), f)?;
    }
    candidate = full;

    let verify = options.check || info.shape == Shape::Dag;
    if verify && !check_solution(&transformed, &candidate)?.is_verified() {
        candidate = least_solution_with(&transformed, &budget)?;
        report.used_fallback = true;
        if let CheckOutcome::FailedClause { clause, .. } = check_solution(&transformed, &candidate)? {
            return Err(Error::Internal(format!(
                "least solution fails clause {} of a system with valid derivations",
                clause
            )));
        }
    }
    report.verdict = Verdict::Solvable(candidate);
    Ok(report)
}

/// Assigns zero to variables of the implication the model leaves open.
fn complete_model(mut model: Model, d: &Derivation) -> Model {
    let mut vars: BTreeSet<Variable> = BTreeSet::new();
    for t in &d.implication.body {
        t.constraint.collect_vars(&mut vars);
    }
    if let GroundHead::Formula(f) = &d.implication.head {
        vars.extend(f.vars());
    }
    for v in vars {
        model.assignment.entry(v).or_insert_with(Rational::zero);
    }
    model
}
