//! Exhaustive resolution of unknown predicates.
//!
//! Each derivation tree instantiates clauses with fresh variables: a child's
//! head arguments are bound to the parent's atom arguments, everything else
//! is renamed apart. The body of the resulting ground implication keeps, for
//! every constraint, the tree node it came from.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::DependencyInfo;
use crate::limits::Budget;
use crate::logic::{
    Atom, AtomicConstraint, ClauseSystem, DnfFormula, Head, HornClause, PredicateSymbol, Renaming,
    Variable,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationNode {
    pub clause: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The instantiated head atom, `None` for a query root.
    pub head: Option<Atom>,
    pub renaming: Renaming,
}

/// Nodes in preorder; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTree {
    pub nodes: Vec<DerivationNode>,
}

impl DerivationTree {
    pub fn root_clause(&self) -> usize {
        self.nodes[0].clause
    }

    /// Path of child positions from the root to `node`.
    pub fn path(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            let pos = self.nodes[p].children.iter().position(|&c| c == cur).unwrap();
            out.push(pos);
            cur = p;
        }
        out.reverse();
        out
    }

    /// `node` and all of its descendants.
    pub fn subtree(&self, node: usize) -> Vec<usize> {
        let mut out = vec![node];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedConstraint {
    pub constraint: AtomicConstraint,
    pub node: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundHead {
    Formula(DnfFormula),
    Atom(Atom),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundImplication {
    pub body: Vec<TaggedConstraint>,
    pub head: GroundHead,
}

impl GroundImplication {
    pub fn body_constraints(&self) -> Vec<AtomicConstraint> {
        self.body.iter().map(|t| t.constraint.clone()).collect()
    }

    pub fn head_formula(&self) -> Option<&DnfFormula> {
        match &self.head {
            GroundHead::Formula(f) => Some(f),
            GroundHead::Atom(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub tree: DerivationTree,
    pub implication: GroundImplication,
}

/// All derivations of every query clause.
pub fn unfold(system: &ClauseSystem, info: &DependencyInfo, budget: &Budget) -> Result<Vec<Derivation>> {
    unfold_from(system, &info.query_clauses, budget)
}

/// Number of derivations [`unfold`] would produce, saturating. Predicates
/// that head no clause must have been pruned first.
pub fn derivation_count(system: &ClauseSystem) -> Result<u128> {
    let mut u = Unfolder::new(system);
    let mut total: u128 = 0;
    for c in system.query_clauses() {
        total = total.saturating_add(u.count_clause(c)?);
    }
    Ok(total)
}

/// All derivations rooted at the given clauses. Roots with an atom head give
/// implications with that (instantiated) atom as head.
pub fn unfold_from(system: &ClauseSystem, roots: &[usize], budget: &Budget) -> Result<Vec<Derivation>> {
    let mut u = Unfolder::new(system);
    let mut total: u128 = 0;
    for &r in roots {
        let clause = u.clause(r)?;
        total = total.saturating_add(u.count_clause(clause)?);
    }
    let cap = budget.limits().max_derivations;
    if total > cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "unfolding needs {} derivations (limit {})",
            total, cap
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    for &r in roots {
        let clause = u.clause(r)?;
        for choice in u.clause_choices(clause)? {
            budget.check_time()?;
            out.push(instantiate(system, &u, &choice));
        }
    }
    Ok(out)
}

/// Clause structure of a derivation before renaming.
struct Choice {
    clause: usize,
    children: Vec<Rc<Choice>>,
}

struct Unfolder<'a> {
    system: &'a ClauseSystem,
    by_id: HashMap<usize, &'a HornClause>,
    counts: HashMap<PredicateSymbol, u128>,
    memo: HashMap<PredicateSymbol, Vec<Rc<Choice>>>,
}

impl<'a> Unfolder<'a> {
    fn new(system: &'a ClauseSystem) -> Self {
        Unfolder {
            system,
            by_id: system.clauses().iter().map(|c| (c.id, c)).collect(),
            counts: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn clause(&self, id: usize) -> Result<&'a HornClause> {
        self.by_id
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Input(format!("no clause with id {}", id)))
    }

    fn count_clause(&mut self, c: &HornClause) -> Result<u128> {
        let mut n: u128 = 1;
        for a in &c.body_atoms {
            n = n.saturating_mul(self.count_pred(a.predicate())?);
        }
        Ok(n)
    }

    fn count_pred(&mut self, p: &PredicateSymbol) -> Result<u128> {
        if let Some(&n) = self.counts.get(p) {
            return Ok(n);
        }
        let heads: Vec<&HornClause> = self.system.head_clauses(p).collect();
        if heads.is_empty() {
            return Err(Error::UnresolvableAtom(p.clone()));
        }
        let mut n: u128 = 0;
        for c in heads {
            n = n.saturating_add(self.count_clause(c)?);
        }
        self.counts.insert(p.clone(), n);
        Ok(n)
    }

    fn clause_choices(&mut self, c: &HornClause) -> Result<Vec<Rc<Choice>>> {
        let mut partial: Vec<Vec<Rc<Choice>>> = vec![Vec::new()];
        for a in &c.body_atoms {
            let options = self.pred_choices(a.predicate())?;
            let mut next = Vec::with_capacity(partial.len() * options.len());
            for prefix in &partial {
                for o in &options {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    next.push(v);
                }
            }
            partial = next;
        }
        Ok(partial
            .into_iter()
            .map(|children| {
                Rc::new(Choice {
                    clause: c.id,
                    children,
                })
            })
            .collect())
    }

    fn pred_choices(&mut self, p: &PredicateSymbol) -> Result<Vec<Rc<Choice>>> {
        if let Some(v) = self.memo.get(p) {
            return Ok(v.clone());
        }
        let heads: Vec<&HornClause> = self.system.head_clauses(p).collect();
        if heads.is_empty() {
            return Err(Error::UnresolvableAtom(p.clone()));
        }
        let mut out = Vec::new();
        for c in heads {
            out.extend(self.clause_choices(c)?);
        }
        self.memo.insert(p.clone(), out.clone());
        Ok(out)
    }
}

struct Builder<'s> {
    next_var: u32,
    nodes: Vec<DerivationNode>,
    body: Vec<TaggedConstraint>,
    unfolder: &'s Unfolder<'s>,
}

impl Builder<'_> {
    fn fresh(&mut self, base: &Variable, node: usize) -> Variable {
        let v = Variable::new(self.next_var, format!("{}_{}", base.name(), node));
        self.next_var += 1;
        v
    }

    /// Instantiates `choice` as node `idx`, binding its head arguments to `bound`.
    fn build(&mut self, choice: &Choice, parent: Option<usize>, bound: Option<&Atom>) -> usize {
        let clause = self.unfolder.by_id[&choice.clause];
        let idx = self.nodes.len();
        let mut renaming = Renaming::new();
        if let (Some(target), Some(head)) = (bound, clause.head.atom()) {
            for (formal, actual) in head.args().iter().zip(target.args()) {
                renaming.insert(formal.clone(), actual.clone());
            }
        }
        let vars: BTreeSet<Variable> = clause.vars();
        for v in &vars {
            if !renaming.contains_key(v) {
                let f = self.fresh(v, idx);
                renaming.insert(v.clone(), f);
            }
        }
        self.nodes.push(DerivationNode {
            clause: clause.id,
            parent,
            children: Vec::new(),
            head: clause.head.atom().map(|a| a.rename(&renaming)),
            renaming: renaming.clone(),
        });
        for c in clause.body.constraints() {
            self.body.push(TaggedConstraint {
                constraint: c.rename(&renaming),
                node: idx,
            });
        }
        for (atom, sub) in clause.body_atoms.iter().zip(&choice.children) {
            let inst = atom.rename(&renaming);
            let child = self.build(sub, Some(idx), Some(&inst));
            self.nodes[idx].children.push(child);
        }
        idx
    }
}

fn instantiate(system: &ClauseSystem, unfolder: &Unfolder<'_>, choice: &Choice) -> Derivation {
    let mut b = Builder {
        next_var: system.var_bound(),
        nodes: Vec::new(),
        body: Vec::new(),
        unfolder,
    };
    b.build(choice, None, None);
    let root_clause = unfolder.by_id[&choice.clause];
    let head = match &root_clause.head {
        Head::Formula(f) => GroundHead::Formula(f.rename(&b.nodes[0].renaming)),
        Head::Atom(_) => GroundHead::Atom(b.nodes[0].head.clone().unwrap()),
    };
    Derivation {
        tree: DerivationTree { nodes: b.nodes },
        implication: GroundImplication { body: b.body, head },
    }
}

/// Predicates with at least one derivation (their least interpretation may
/// be nonempty). Everything else can only be interpreted as `false`.
pub fn derivable_predicates(system: &ClauseSystem) -> BTreeSet<PredicateSymbol> {
    let mut derivable = BTreeSet::new();
    loop {
        let mut changed = false;
        for c in system.clauses() {
            if let Some(h) = c.head_predicate() {
                if !derivable.contains(h)
                    && c.body_atoms.iter().all(|a| derivable.contains(a.predicate()))
                {
                    derivable.insert(h.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            return derivable;
        }
    }
}

/// Drops every clause whose body mentions a predicate without derivations.
/// Returns the pruned system and the underivable predicates.
pub fn prune_underivable(system: &ClauseSystem) -> (ClauseSystem, Vec<PredicateSymbol>) {
    let derivable = derivable_predicates(system);
    let dead: Vec<PredicateSymbol> = system
        .predicates()
        .iter()
        .filter(|p| !derivable.contains(*p))
        .cloned()
        .collect();
    let mut pruned = system.clone();
    pruned.retain_clauses(|c| c.body_atoms.iter().all(|a| derivable.contains(a.predicate())));
    (pruned, dead)
}
