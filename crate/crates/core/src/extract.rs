//! Reading predicate interpretations off Farkas certificates.
//!
//! For a refuted ground implication, the interpolant of a derivation node is
//! the certificate-weighted sum of the constraints in its subtree. Variables
//! private to the subtree cancel, so the sum only mentions the node's head
//! arguments.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::logic::{
    AtomicConstraint, ClauseSystem, Conjunction, DnfFormula, LinearTerm, PredicateSymbol,
    Relation, Solution,
};
use crate::lra::Refutation;
use crate::unfold::Derivation;

/// Interpolant of one derivation node, over the node's instantiated head arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInterpolant {
    pub node: usize,
    pub predicate: PredicateSymbol,
    pub formula: Conjunction,
}

#[derive(Clone, Default)]
struct Sum {
    term: LinearTerm,
    any: bool,
    strict: bool,
    only_eq: bool,
}

impl Sum {
    fn new() -> Self {
        Sum {
            only_eq: true,
            ..Default::default()
        }
    }

    fn add_constraint(&mut self, c: &AtomicConstraint, w: &crate::logic::Rational) {
        self.term.add_assign_scaled(c.term(), w);
        self.any = true;
        match c.relation() {
            Relation::Eq => {}
            Relation::Gt => {
                self.only_eq = false;
                if w.is_positive() {
                    self.strict = true;
                }
            }
            Relation::Ge => self.only_eq = false,
        }
    }

    fn absorb(&mut self, other: &Sum) {
        self.term.add_assign_scaled(&other.term, &crate::logic::rat(1));
        self.any |= other.any;
        self.strict |= other.strict;
        self.only_eq &= other.only_eq;
    }

    fn constraint(&self) -> Option<AtomicConstraint> {
        if !self.any {
            return None;
        }
        let rel = if self.strict {
            Relation::Gt
        } else if self.only_eq {
            Relation::Eq
        } else {
            Relation::Ge
        };
        let c = AtomicConstraint::new(self.term.clone(), rel);
        (!c.is_trivially_true()).then_some(c)
    }
}

/// Interpolants for every non-root node of `derivation`, conjoined over the
/// refutations of its negated head.
pub fn node_interpolants(
    derivation: &Derivation,
    refutations: &[Refutation],
) -> Result<Vec<NodeInterpolant>> {
    let nodes = &derivation.tree.nodes;
    let body = &derivation.implication.body;
    let mut per_node: Vec<Vec<AtomicConstraint>> = vec![Vec::new(); nodes.len()];
    for r in refutations {
        let mut sums = vec![Sum::new(); nodes.len()];
        for (&i, w) in r.certificate.weights() {
            if w.is_zero() {
                continue;
            }
            // negated-head constraints sit past the body and belong to the root
            match body.get(i) {
                Some(t) => sums[t.node].add_constraint(&t.constraint, w),
                None => {
                    let c = r.negated_head.get(i - body.len()).ok_or_else(|| {
                        Error::Internal("certificate index out of range".into())
                    })?;
                    sums[0].add_constraint(c, w);
                }
            }
        }
        // preorder: children come after their parent
        for n in (1..nodes.len()).rev() {
            let parent = nodes[n].parent.unwrap();
            let child = sums[n].clone();
            sums[parent].absorb(&child);
        }
        for (n, s) in sums.iter().enumerate().skip(1) {
            if let Some(c) = s.constraint() {
                per_node[n].push(c);
            }
        }
    }

    let mut out = Vec::new();
    for (n, node) in nodes.iter().enumerate().skip(1) {
        let head = node
            .head
            .as_ref()
            .ok_or_else(|| Error::Internal("non-root derivation node without head".into()))?;
        let formula = Conjunction::new(std::mem::take(&mut per_node[n]));
        if let Some(v) = formula.vars().into_iter().find(|v| !head.args().contains(v)) {
            return Err(Error::Internal(format!(
                "interpolant at node {} mentions {} outside {}",
                n, v, head
            )));
        }
        out.push(NodeInterpolant {
            node: n,
            predicate: head.predicate().clone(),
            formula,
        });
    }
    Ok(out)
}

/// Each predicate becomes the conjunction of the interpolants of all of its
/// occurrences across `proved`. Predicates that never occur are `true`.
pub fn extract_solution(
    system: &ClauseSystem,
    proved: &[(Derivation, Vec<Refutation>)],
) -> Result<Solution> {
    let mut acc: BTreeMap<PredicateSymbol, Vec<AtomicConstraint>> = BTreeMap::new();
    for (d, refs) in proved {
        for ni in node_interpolants(d, refs)? {
            let head = d.tree.nodes[ni.node].head.as_ref().unwrap();
            let formal = ni.formula.rename(&head.to_formals());
            acc.entry(ni.predicate).or_default().extend(formal);
        }
    }
    let mut sol = Solution::new();
    for p in system.predicates() {
        let f = match acc.remove(p) {
            Some(cs) => DnfFormula::from_conjunction(Conjunction::new(cs)),
            None => DnfFormula::truth(),
        };
        sol.insert(p.clone(), f)?;
    }
    Ok(sol)
}
