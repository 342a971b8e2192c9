//! Reading and printing clause systems, solutions, and counterexamples.
//!
//! Two surface syntaxes are supported: a Prolog-style native format (`.chc`)
//! and an SMT-LIB2 Horn dialect (`.smt2`) with one extra command,
//! `(declare-wf p)`, for well-foundedness conditions.

mod native;
mod sexp;
mod smt2;

pub(crate) use native::parse_formula;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::logic::{
    Atom, AtomicConstraint, ClauseSystem, Conjunction, DnfFormula, Head, LinearTerm,
    PredicateSymbol, Rational, Solution, Variable,
};
use crate::lra::Model;
use crate::solver::Counterexample;
use crate::unfold::DerivationTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SourceFormat {
    Native,
    Smtlib2,
}

impl SourceFormat {
    /// `.chc` is native, `.smt2` is SMT-LIB2.
    pub fn from_path(path: impl AsRef<Path>) -> Option<Self> {
        match path.as_ref().extension()?.to_str()? {
            "chc" => Some(SourceFormat::Native),
            "smt2" => Some(SourceFormat::Smtlib2),
            _ => None,
        }
    }
}

impl FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" | "chc" => Ok(SourceFormat::Native),
            "smt2" | "smtlib2" => Ok(SourceFormat::Smtlib2),
            _ => Err(Error::Input(format!("unknown format `{}`", s))),
        }
    }
}

impl fmt::Display for SourceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFormat::Native => "native",
            SourceFormat::Smtlib2 => "smt2",
        })
    }
}

pub fn parse_system(text: &str, format: SourceFormat) -> Result<ClauseSystem> {
    match format {
        SourceFormat::Native => native::parse_system(text),
        SourceFormat::Smtlib2 => smt2::parse_system(text),
    }
}

/// Parses predicate definitions, as printed by [`render_solution`].
pub fn parse_solution(text: &str, format: SourceFormat) -> Result<Solution> {
    match format {
        SourceFormat::Native => native::parse_solution(text),
        SourceFormat::Smtlib2 => smt2::parse_solution(text),
    }
}

pub fn render_system(system: &ClauseSystem, format: SourceFormat) -> String {
    match format {
        SourceFormat::Native => native::render_system(system),
        SourceFormat::Smtlib2 => smt2::render_system(system),
    }
}

pub fn render_solution(sol: &Solution, format: SourceFormat) -> String {
    match format {
        SourceFormat::Native => native::render_solution(sol),
        SourceFormat::Smtlib2 => smt2::render_solution(sol),
    }
}

pub fn render_counterexample(cex: &Counterexample, format: SourceFormat) -> String {
    match format {
        SourceFormat::Native => native::render_counterexample(cex),
        SourceFormat::Smtlib2 => smt2::render_counterexample(cex),
    }
}

/// A point, one `name = value.` line (native) or a `(model …)` block.
pub fn render_model(model: &Model, format: SourceFormat) -> String {
    match format {
        SourceFormat::Native => native::render_model(model),
        SourceFormat::Smtlib2 => smt2::render_model(model),
    }
}

/// A formula in native syntax, variables printed by name.
pub fn render_formula(f: &DnfFormula) -> String {
    let names = display_names(f.vars().iter(), SourceFormat::Native, &HashSet::new());
    native::formula(f, &names)
}

/// Names used when printing the variables of one clause (or formula).
///
/// Each name is made valid for the format and unique among `vars`; names in
/// `reserved` are avoided.
pub fn display_names<'a>(
    vars: impl IntoIterator<Item = &'a Variable>,
    format: SourceFormat,
    reserved: &HashSet<String>,
) -> HashMap<Variable, String> {
    let sorted: BTreeSet<&Variable> = vars.into_iter().collect();
    let mut taken: HashSet<String> = reserved.clone();
    let mut out = HashMap::new();
    for v in sorted {
        let base = match format {
            SourceFormat::Native => native::variable_name(v.name()),
            SourceFormat::Smtlib2 => smt2::variable_name(v.name()),
        };
        let mut name = base.clone();
        let mut n = 1;
        while taken.contains(&name) {
            name = format!("{}_{}", base, n);
            n += 1;
        }
        taken.insert(name.clone());
        out.insert(v.clone(), name);
    }
    out
}

/// Variables of a clause in print order.
fn clause_vars(c: &crate::logic::HornClause) -> BTreeSet<Variable> {
    c.vars()
}

/// `2(1(0))`: clause ids, children in parentheses.
fn derivation_text(tree: &DerivationTree, node: usize, sep: &str) -> String {
    let n = &tree.nodes[node];
    if n.children.is_empty() {
        return n.clause.to_string();
    }
    let kids: Vec<String> = n
        .children
        .iter()
        .map(|&c| derivation_text(tree, c, sep))
        .collect();
    format!("{}({})", n.clause, kids.join(sep))
}

type Monomials = Vec<(Variable, Rational)>;

/// Splits `term` into positive parts (left) and negated negative parts
/// (right), so that `term ⊳ 0` reads `left ⊳ right`.
fn sides(term: &LinearTerm) -> (Monomials, Monomials, Rational, Rational) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (v, a) in term.coeffs() {
        if a.is_positive() {
            left.push((v.clone(), a.clone()));
        } else {
            right.push((v.clone(), -a.clone()));
        }
    }
    let c = term.constant_part().clone();
    let (lc, rc) = if c.is_negative() {
        (Rational::zero(), -c)
    } else {
        (c, Rational::zero())
    };
    (left, right, lc, rc)
}

// ---------------------------------------------------------------------------
// Shared clause construction for both parsers.

#[derive(Clone, Debug)]
pub(crate) struct AtomSyntax {
    pub name: String,
    pub args: Vec<LinearTerm>,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum Lit {
    Atom(AtomSyntax),
    Constraint(AtomicConstraint),
}

/// A clause body in disjunctive normal form over literals.
#[derive(Clone, Debug)]
pub(crate) struct Body(pub Vec<Vec<Lit>>);

impl Body {
    pub fn truth() -> Self {
        Body(vec![Vec::new()])
    }

    pub fn falsity() -> Self {
        Body(vec![vec![Lit::Constraint(AtomicConstraint::falsity())]])
    }

    pub fn lit(l: Lit) -> Self {
        Body(vec![vec![l]])
    }

    pub fn formula(f: &DnfFormula) -> Self {
        if f.is_false() {
            return Body::falsity();
        }
        Body(
            f.disjuncts()
                .iter()
                .map(|d| d.constraints().iter().cloned().map(Lit::Constraint).collect())
                .collect(),
        )
    }

    pub fn and(&self, other: &Body) -> Body {
        let mut out = Vec::with_capacity(self.0.len() * other.0.len());
        for a in &self.0 {
            for b in &other.0 {
                let mut d = a.clone();
                d.extend(b.iter().cloned());
                out.push(d);
            }
        }
        Body(out)
    }

    pub fn or(mut self, other: Body) -> Body {
        self.0.extend(other.0);
        self
    }

    /// The body as a theory formula; fails on the first atom.
    pub fn into_formula(self) -> std::result::Result<DnfFormula, AtomSyntax> {
        let mut disjuncts = Vec::with_capacity(self.0.len());
        for d in self.0 {
            let mut cs = Vec::with_capacity(d.len());
            for l in d {
                match l {
                    Lit::Atom(a) => return Err(a),
                    Lit::Constraint(c) => cs.push(c),
                }
            }
            disjuncts.push(Conjunction::new(cs));
        }
        Ok(DnfFormula::new(disjuncts))
    }
}

pub(crate) enum HeadSyntax {
    Atom(AtomSyntax),
    Formula(DnfFormula),
}

/// The predicate `name/arity`, declared on first use.
pub(crate) fn resolve_predicate(
    system: &mut ClauseSystem,
    name: &str,
    arity: usize,
    line: usize,
    column: usize,
) -> Result<PredicateSymbol> {
    if let Some(p) = system.predicates().iter().find(|p| p.name() == name) {
        if p.arity() != arity {
            return Err(Error::syntax(
                line,
                column,
                format!("{} used with {} arguments, declared with {}", name, arity, p.arity()),
            ));
        }
        return Ok(p.clone());
    }
    Ok(system.declare(name, arity))
}

/// Binds each argument to a distinct variable, adding `fresh = term` for
/// arguments that are not plain variables or repeat an earlier one.
fn flatten(
    system: &mut ClauseSystem,
    atom: &AtomSyntax,
    extra: &mut Vec<AtomicConstraint>,
) -> Result<Atom> {
    let p = resolve_predicate(system, &atom.name, atom.args.len(), atom.line, atom.column)?;
    let mut args: Vec<Variable> = Vec::with_capacity(atom.args.len());
    for t in &atom.args {
        let plain = match t.coeffs().iter().next() {
            Some((v, a)) if t.coeffs().len() == 1 && a.is_one() && t.constant_part().is_zero() => {
                Some(v.clone())
            }
            _ => None,
        };
        match plain {
            Some(v) if !args.contains(&v) => args.push(v),
            _ => {
                let fresh = system.fresh_var("_G");
                extra.push(AtomicConstraint::eq(LinearTerm::var(fresh.clone()), t.clone()));
                args.push(fresh);
            }
        }
    }
    Atom::new(p, args)
}

/// Adds one clause per body disjunct.
pub(crate) fn add_clauses(system: &mut ClauseSystem, body: &Body, head: &HeadSyntax) -> Result<()> {
    for d in &body.0 {
        let mut constraints = Vec::new();
        let mut atoms = Vec::new();
        for l in d {
            match l {
                Lit::Atom(a) => atoms.push(flatten(system, a, &mut constraints)?),
                Lit::Constraint(c) => constraints.push(c.clone()),
            }
        }
        let head = match head {
            HeadSyntax::Atom(a) => Head::Atom(flatten(system, a, &mut constraints)?),
            HeadSyntax::Formula(f) => Head::Formula(f.clone()),
        };
        system.add_clause(atoms, Conjunction::new(constraints), head)?;
    }
    Ok(())
}

/// Resolves pending wf conditions once every predicate is known.
pub(crate) fn add_wf(system: &mut ClauseSystem, atom: &AtomSyntax) -> Result<()> {
    let Some(p) = system.predicates().iter().find(|p| p.name() == atom.name).cloned() else {
        return Err(Error::syntax(
            atom.line,
            atom.column,
            format!("well-foundedness condition on undeclared predicate {}", atom.name),
        ));
    };
    if p.arity() != atom.args.len() {
        return Err(Error::syntax(
            atom.line,
            atom.column,
            format!("{} used with {} arguments, declared with {}", p.name(), atom.args.len(), p.arity()),
        ));
    }
    if p.arity() % 2 != 0 {
        return Err(Error::syntax(
            atom.line,
            atom.column,
            format!("well-foundedness condition on {} needs an even arity", p),
        ));
    }
    system.add_wf(&p)
}

/// `(p, f)` where `f` is over the definition's parameters, renamed to formals.
pub(crate) fn definition(
    name: &str,
    params: &[Variable],
    body: DnfFormula,
) -> Result<(PredicateSymbol, DnfFormula)> {
    let p = PredicateSymbol::new(name, params.len());
    let map = params
        .iter()
        .cloned()
        .zip(p.formals())
        .collect::<HashMap<_, _>>();
    Ok((p, body.rename(&map)))
}
