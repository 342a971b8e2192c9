use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use super::formula::{Conjunction, DnfFormula};
use super::term::{Renaming, Variable};
use crate::error::{Error, Result};

/// An unknown relation `name/arity`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateSymbol {
    name: Arc<str>,
    arity: usize,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        PredicateSymbol {
            name: name.into(),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `X1 … X_arity`
    pub fn formals(&self) -> Vec<Variable> {
        (0..self.arity).map(Variable::formal).collect()
    }
}

impl fmt::Debug for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// `p(x₁, …, xₙ)` with pairwise distinct variable arguments.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    predicate: PredicateSymbol,
    args: Vec<Variable>,
}

impl Atom {
    pub fn new(predicate: PredicateSymbol, args: Vec<Variable>) -> Result<Self> {
        if args.len() != predicate.arity() {
            return Err(Error::Input(format!(
                "{} applied to {} arguments",
                predicate,
                args.len()
            )));
        }
        let distinct: HashSet<&Variable> = args.iter().collect();
        if distinct.len() != args.len() {
            return Err(Error::Input(format!(
                "repeated variable in arguments of {}",
                predicate
            )));
        }
        Ok(Atom { predicate, args })
    }

    pub fn predicate(&self) -> &PredicateSymbol {
        &self.predicate
    }

    pub fn args(&self) -> &[Variable] {
        &self.args
    }

    pub fn rename(&self, map: &Renaming) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
                .collect(),
        }
    }

    /// Maps the formal parameters of the predicate onto this atom's arguments.
    pub fn formal_renaming(&self) -> Renaming {
        self.args
            .iter()
            .enumerate()
            .map(|(i, v)| (Variable::formal(i), v.clone()))
            .collect()
    }

    /// Maps this atom's arguments onto the predicate's formal parameters.
    pub fn to_formals(&self) -> Renaming {
        self.args
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), Variable::formal(i)))
            .collect()
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate.name())?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", a)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Head {
    Atom(Atom),
    /// A query: the head is a theory formula (possibly `false`).
    Formula(DnfFormula),
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::Atom(a) => Some(a),
            Head::Formula(_) => None,
        }
    }
}

/// `body_atoms ∧ body → head`, implicitly universally quantified.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HornClause {
    pub id: usize,
    pub body_atoms: Vec<Atom>,
    pub body: Conjunction,
    pub head: Head,
}

impl HornClause {
    pub fn is_query(&self) -> bool {
        matches!(self.head, Head::Formula(_))
    }

    pub fn head_predicate(&self) -> Option<&PredicateSymbol> {
        self.head.atom().map(Atom::predicate)
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = self.body.vars();
        for a in &self.body_atoms {
            out.extend(a.args().iter().cloned());
        }
        match &self.head {
            Head::Atom(a) => out.extend(a.args().iter().cloned()),
            Head::Formula(f) => out.extend(f.vars()),
        }
        out
    }

    pub fn rename(&self, map: &Renaming) -> HornClause {
        HornClause {
            id: self.id,
            body_atoms: self.body_atoms.iter().map(|a| a.rename(map)).collect(),
            body: self.body.rename(map),
            head: match &self.head {
                Head::Atom(a) => Head::Atom(a.rename(map)),
                Head::Formula(f) => Head::Formula(f.rename(map)),
            },
        }
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.body_atoms.iter().map(|a| a.to_string()).collect();
        if !self.body.is_true() || parts.is_empty() {
            parts.push(self.body.to_string());
        }
        write!(f, "{} → ", parts.join(" ∧ "))?;
        match &self.head {
            Head::Atom(a) => write!(f, "{}", a),
            Head::Formula(h) => write!(f, "{}", h),
        }
    }
}

/// Requires the binary relation denoted by `predicate` to be well-founded.
/// The first half of the parameters is the pre-state, the second the post-state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WfCondition {
    pub predicate: PredicateSymbol,
}

impl WfCondition {
    pub fn state_arity(&self) -> usize {
        self.predicate.arity() / 2
    }
}

#[derive(Clone, Default, Debug, PartialEq)]
pub struct ClauseSystem {
    predicates: Vec<PredicateSymbol>,
    clauses: Vec<HornClause>,
    wf_conditions: Vec<WfCondition>,
    next_var: u32,
    next_clause: usize,
}

impl ClauseSystem {
    pub fn new() -> Self {
        ClauseSystem::default()
    }

    /// Declares `name/arity`; redeclaring an existing symbol is a no-op.
    pub fn declare(&mut self, name: &str, arity: usize) -> PredicateSymbol {
        if let Some(p) = self.predicate(name, arity) {
            return p.clone();
        }
        let p = PredicateSymbol::new(name, arity);
        self.predicates.push(p.clone());
        p
    }

    pub fn predicate(&self, name: &str, arity: usize) -> Option<&PredicateSymbol> {
        self.predicates
            .iter()
            .find(|p| p.name() == name && p.arity() == arity)
    }

    pub fn is_declared(&self, p: &PredicateSymbol) -> bool {
        self.predicates.contains(p)
    }

    pub fn predicates(&self) -> &[PredicateSymbol] {
        &self.predicates
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn clause(&self, id: usize) -> Option<&HornClause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn wf_conditions(&self) -> &[WfCondition] {
        &self.wf_conditions
    }

    pub fn fresh_var(&mut self, name: &str) -> Variable {
        let v = Variable::new(self.next_var, name);
        self.next_var += 1;
        v
    }

    /// One past the largest variable index in use.
    pub fn var_bound(&self) -> u32 {
        self.next_var
    }

    pub fn add_clause(
        &mut self,
        body_atoms: Vec<Atom>,
        body: Conjunction,
        head: Head,
    ) -> Result<usize> {
        let id = self.next_clause;
        self.push_clause(HornClause {
            id,
            body_atoms,
            body,
            head,
        })?;
        Ok(id)
    }

    /// Inserts a clause keeping its id. Fails on duplicate ids or undeclared predicates.
    pub fn push_clause(&mut self, clause: HornClause) -> Result<()> {
        if self.clauses.iter().any(|c| c.id == clause.id) {
            return Err(Error::Input(format!("duplicate clause id {}", clause.id)));
        }
        let atoms = clause.body_atoms.iter().chain(clause.head.atom());
        for a in atoms {
            if !self.is_declared(a.predicate()) {
                return Err(Error::Input(format!(
                    "predicate {} is not declared",
                    a.predicate()
                )));
            }
        }
        for v in clause.vars() {
            self.next_var = self.next_var.max(v.index() + 1);
        }
        self.next_clause = self.next_clause.max(clause.id + 1);
        self.clauses.push(clause);
        Ok(())
    }

    pub fn add_wf(&mut self, predicate: &PredicateSymbol) -> Result<()> {
        if !self.is_declared(predicate) {
            return Err(Error::Input(format!(
                "well-foundedness condition on undeclared predicate {}",
                predicate
            )));
        }
        if !predicate.arity().is_multiple_of(2) {
            return Err(Error::Input(format!(
                "well-foundedness condition on {} needs an even arity",
                predicate
            )));
        }
        if !self.wf_conditions.iter().any(|w| &w.predicate == predicate) {
            self.wf_conditions.push(WfCondition {
                predicate: predicate.clone(),
            });
        }
        Ok(())
    }

    pub fn head_clauses<'a>(
        &'a self,
        p: &'a PredicateSymbol,
    ) -> impl Iterator<Item = &'a HornClause> + 'a {
        self.clauses
            .iter()
            .filter(move |c| c.head_predicate() == Some(p))
    }

    pub fn query_clauses(&self) -> impl Iterator<Item = &HornClause> {
        self.clauses.iter().filter(|c| c.is_query())
    }

    /// Same predicates and clauses, no well-foundedness conditions.
    pub fn without_wf(&self) -> ClauseSystem {
        ClauseSystem {
            wf_conditions: Vec::new(),
            ..self.clone()
        }
    }

    pub fn retain_clauses(&mut self, mut keep: impl FnMut(&HornClause) -> bool) {
        self.clauses.retain(|c| keep(c));
    }

    pub fn remove_wf(&mut self, p: &PredicateSymbol) {
        self.wf_conditions.retain(|w| &w.predicate != p);
    }
}

/// Interpretation of every unknown predicate as a formula over its formal
/// parameters `X1 … Xn`.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Solution {
    assignment: BTreeMap<PredicateSymbol, DnfFormula>,
}

impl Solution {
    pub fn new() -> Self {
        Solution::default()
    }

    pub fn insert(&mut self, p: PredicateSymbol, f: DnfFormula) -> Result<()> {
        if let Some(bad) = f.vars().iter().find(|v| v.index() as usize >= p.arity()) {
            return Err(Error::Input(format!(
                "definition of {} mentions non-parameter {}",
                p, bad
            )));
        }
        self.assignment.insert(p, f);
        Ok(())
    }

    pub fn get(&self, p: &PredicateSymbol) -> Option<&DnfFormula> {
        self.assignment.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PredicateSymbol, &DnfFormula)> {
        self.assignment.iter()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// The definition of `atom`'s predicate with formals replaced by its arguments.
    pub fn instantiate(&self, atom: &Atom) -> Result<DnfFormula> {
        let f = self.get(atom.predicate()).ok_or_else(|| {
            Error::Input(format!("solution has no entry for {}", atom.predicate()))
        })?;
        Ok(f.rename(&atom.formal_renaming()))
    }
}

/// `body → head` over theory formulas only.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Implication {
    pub body: DnfFormula,
    pub head: DnfFormula,
}

/// Replaces every atom in `clause` by its definition in `sol`.
pub fn substitute(sol: &Solution, clause: &HornClause) -> Result<Implication> {
    let mut body = DnfFormula::from_conjunction(clause.body.clone());
    for a in &clause.body_atoms {
        body = body.and(&sol.instantiate(a)?);
    }
    let head = match &clause.head {
        Head::Atom(a) => sol.instantiate(a)?,
        Head::Formula(f) => f.clone(),
    };
    Ok(Implication { body, head })
}
