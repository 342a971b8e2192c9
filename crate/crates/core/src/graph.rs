//! Dependency analysis between unknown predicates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::logic::{ClauseSystem, PredicateSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Every predicate heads at most one clause and occurs at most once in bodies.
    Tree,
    Dag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyInfo {
    /// `q ↦ {p, …}` when `p` occurs in the body of a clause with head `q`.
    pub edges: BTreeMap<PredicateSymbol, BTreeSet<PredicateSymbol>>,
    /// Dependencies first.
    pub topo_order: Vec<PredicateSymbol>,
    pub shape: Shape,
    /// Ids of clauses with a formula head.
    pub query_clauses: Vec<usize>,
}

pub fn analyze(system: &ClauseSystem) -> Result<DependencyInfo> {
    let preds = system.predicates();
    let mut edges: BTreeMap<PredicateSymbol, BTreeSet<PredicateSymbol>> =
        preds.iter().map(|p| (p.clone(), BTreeSet::new())).collect();
    let mut head_count: HashMap<&PredicateSymbol, usize> = HashMap::new();
    let mut body_count: HashMap<&PredicateSymbol, usize> = HashMap::new();
    for c in system.clauses() {
        for a in &c.body_atoms {
            *body_count.entry(a.predicate()).or_default() += 1;
        }
        if let Some(h) = c.head_predicate() {
            *head_count.entry(h).or_default() += 1;
            let deps = edges.entry(h.clone()).or_default();
            deps.extend(c.body_atoms.iter().map(|a| a.predicate().clone()));
        }
    }

    if let Some(cycle) = find_cycle(preds, &edges) {
        return Err(Error::Recursion { cycle });
    }

    let topo_order = topological_order(preds, &edges);
    let tree = preds.iter().all(|p| {
        head_count.get(p).copied().unwrap_or(0) <= 1 && body_count.get(p).copied().unwrap_or(0) <= 1
    });
    Ok(DependencyInfo {
        edges,
        topo_order,
        shape: if tree { Shape::Tree } else { Shape::Dag },
        query_clauses: system.query_clauses().map(|c| c.id).collect(),
    })
}

fn find_cycle(
    preds: &[PredicateSymbol],
    edges: &BTreeMap<PredicateSymbol, BTreeSet<PredicateSymbol>>,
) -> Option<Vec<PredicateSymbol>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark: HashMap<&PredicateSymbol, Mark> = preds.iter().map(|p| (p, Mark::New)).collect();

    fn visit<'a>(
        p: &'a PredicateSymbol,
        edges: &'a BTreeMap<PredicateSymbol, BTreeSet<PredicateSymbol>>,
        mark: &mut HashMap<&'a PredicateSymbol, Mark>,
        stack: &mut Vec<&'a PredicateSymbol>,
    ) -> Option<Vec<PredicateSymbol>> {
        mark.insert(p, Mark::Active);
        stack.push(p);
        for q in edges.get(p).into_iter().flatten() {
            match mark.get(q).copied().unwrap_or(Mark::New) {
                Mark::Active => {
                    let start = stack.iter().position(|s| *s == q).unwrap();
                    let mut cycle: Vec<PredicateSymbol> =
                        stack[start..].iter().map(|s| (*s).clone()).collect();
                    // report in dependency direction (body before head)
                    cycle.reverse();
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(q, edges, mark, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        mark.insert(p, Mark::Done);
        None
    }

    for p in preds {
        if mark[p] == Mark::New {
            let mut stack = Vec::new();
            if let Some(c) = visit(p, edges, &mut mark, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

/// Kahn's algorithm, breaking ties by declaration order.
fn topological_order(
    preds: &[PredicateSymbol],
    edges: &BTreeMap<PredicateSymbol, BTreeSet<PredicateSymbol>>,
) -> Vec<PredicateSymbol> {
    let position: HashMap<&PredicateSymbol, usize> =
        preds.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut pending: Vec<usize> = preds.iter().map(|p| edges[p].len()).collect();
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); preds.len()];
    for (q, deps) in edges {
        for p in deps {
            dependents[position[p]].push(position[q]);
        }
    }
    let mut ready: BTreeSet<usize> = (0..preds.len()).filter(|&i| pending[i] == 0).collect();
    let mut out = Vec::with_capacity(preds.len());
    while let Some(i) = ready.pop_first() {
        out.push(preds[i].clone());
        for &j in &dependents[i] {
            pending[j] -= 1;
            if pending[j] == 0 {
                ready.insert(j);
            }
        }
    }
    out
}
