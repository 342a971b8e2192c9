use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::term::{LinearTerm, Point, Rational, Renaming, Variable};
use crate::error::Result;

/// Relation of a term against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `t >= 0`
    Ge,
    /// `t > 0`
    Gt,
    /// `t = 0`
    Eq,
}

impl Relation {
    pub fn holds(self, value: &Rational) -> bool {
        match self {
            Relation::Ge => !value.is_negative(),
            Relation::Gt => value.is_positive(),
            Relation::Eq => value.is_zero(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        }
    }
}

/// `term ⊳ 0` in canonical form.
///
/// The leading (lowest-index) variable has coefficient of absolute value one;
/// for equalities it is exactly one. Constraints without variables are scaled
/// so the constant is -1, 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomicConstraint {
    term: LinearTerm,
    rel: Relation,
}

impl AtomicConstraint {
    pub fn new(term: LinearTerm, rel: Relation) -> Self {
        AtomicConstraint { term, rel }.normalized()
    }

    pub fn ge(lhs: LinearTerm, rhs: LinearTerm) -> Self {
        Self::new(lhs.minus(&rhs), Relation::Ge)
    }

    pub fn gt(lhs: LinearTerm, rhs: LinearTerm) -> Self {
        Self::new(lhs.minus(&rhs), Relation::Gt)
    }

    pub fn le(lhs: LinearTerm, rhs: LinearTerm) -> Self {
        Self::new(rhs.minus(&lhs), Relation::Ge)
    }

    pub fn lt(lhs: LinearTerm, rhs: LinearTerm) -> Self {
        Self::new(rhs.minus(&lhs), Relation::Gt)
    }

    pub fn eq(lhs: LinearTerm, rhs: LinearTerm) -> Self {
        Self::new(lhs.minus(&rhs), Relation::Eq)
    }

    pub fn falsity() -> Self {
        Self::new(LinearTerm::constant(-Rational::one()), Relation::Ge)
    }

    pub fn term(&self) -> &LinearTerm {
        &self.term
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    pub fn is_strict(&self) -> bool {
        self.rel == Relation::Gt
    }

    fn normalized(self) -> Self {
        let AtomicConstraint { term, rel } = self;
        let factor = match term.lead() {
            Some((_, lead)) => match rel {
                Relation::Eq => lead.recip(),
                _ => lead.abs().recip(),
            },
            None => {
                let c = term.constant_part();
                if c.is_zero() {
                    Rational::one()
                } else {
                    c.abs().recip()
                }
            }
        };
        let term = if factor.is_one() {
            term
        } else {
            term.scaled(&factor)
        };
        AtomicConstraint { term, rel }
    }

    /// Constraint without variables that holds.
    pub fn is_trivially_true(&self) -> bool {
        self.term.is_constant() && self.rel.holds(self.term.constant_part())
    }

    /// Constraint without variables that fails.
    pub fn is_trivially_false(&self) -> bool {
        self.term.is_constant() && !self.rel.holds(self.term.constant_part())
    }

    pub fn holds(&self, point: &Point) -> Result<bool> {
        Ok(self.rel.holds(&self.term.eval(point)?))
    }

    /// The negation as a disjunction of constraints.
    pub fn negate(&self) -> Vec<AtomicConstraint> {
        let neg = self.term.negated();
        match self.rel {
            Relation::Ge => vec![AtomicConstraint::new(neg, Relation::Gt)],
            Relation::Gt => vec![AtomicConstraint::new(neg, Relation::Ge)],
            Relation::Eq => vec![
                AtomicConstraint::new(self.term.clone(), Relation::Gt),
                AtomicConstraint::new(neg, Relation::Gt),
            ],
        }
    }

    pub fn rename(&self, map: &Renaming) -> Self {
        AtomicConstraint::new(self.term.rename(map), self.rel)
    }

    pub fn substitute(&self, v: &Variable, replacement: &LinearTerm) -> Self {
        AtomicConstraint::new(self.term.substitute(v, replacement), self.rel)
    }

    pub fn mentions(&self, v: &Variable) -> bool {
        self.term.mentions(v)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        self.term.collect_vars(out)
    }

    fn sort_key_lead(&self) -> u32 {
        self.term.lead().map(|(v, _)| v.index()).unwrap_or(u32::MAX)
    }
}

impl PartialOrd for AtomicConstraint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// (lowest variable index, relation, constant), then the remaining
/// coefficients so the order is total.
impl Ord for AtomicConstraint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key_lead()
            .cmp(&other.sort_key_lead())
            .then(self.rel.cmp(&other.rel))
            .then_with(|| self.term.constant_part().cmp(other.term.constant_part()))
            .then_with(|| {
                let a = self.term.coeffs().iter().map(|(v, c)| (v.index(), c));
                let b = other.term.coeffs().iter().map(|(v, c)| (v.index(), c));
                a.cmp(b)
            })
    }
}

impl fmt::Debug for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AtomicConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.term, self.rel.symbol())
    }
}

/// Sorted, duplicate-free conjunction. Empty means `true`; a syntactically
/// false conjunction is collapsed to the single constraint `-1 >= 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Conjunction {
    constraints: Vec<AtomicConstraint>,
}

impl Conjunction {
    pub fn new(constraints: impl IntoIterator<Item = AtomicConstraint>) -> Self {
        let mut out: Vec<AtomicConstraint> = Vec::new();
        for c in constraints {
            if c.is_trivially_false() {
                return Conjunction::falsity();
            }
            if !c.is_trivially_true() {
                out.push(c);
            }
        }
        out.sort();
        out.dedup();
        Conjunction { constraints: out }
    }

    pub fn truth() -> Self {
        Conjunction::default()
    }

    pub fn falsity() -> Self {
        Conjunction {
            constraints: vec![AtomicConstraint::falsity()],
        }
    }

    pub fn constraints(&self) -> &[AtomicConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn is_syntactically_false(&self) -> bool {
        self.constraints.len() == 1 && self.constraints[0].is_trivially_false()
    }

    pub fn and(&self, other: &Conjunction) -> Conjunction {
        Conjunction::new(
            self.constraints
                .iter()
                .chain(other.constraints.iter())
                .cloned(),
        )
    }

    pub fn with(&self, c: AtomicConstraint) -> Conjunction {
        Conjunction::new(self.constraints.iter().cloned().chain(Some(c)))
    }

    pub fn holds(&self, point: &Point) -> Result<bool> {
        for c in &self.constraints {
            if !c.holds(point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn rename(&self, map: &Renaming) -> Self {
        Conjunction::new(self.constraints.iter().map(|c| c.rename(map)))
    }

    pub fn substitute(&self, v: &Variable, replacement: &LinearTerm) -> Self {
        Conjunction::new(self.constraints.iter().map(|c| c.substitute(v, replacement)))
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            c.collect_vars(&mut out);
        }
        out
    }

    /// ¬(c₁ ∧ … ∧ cₖ) as a DNF.
    pub fn negate(&self) -> DnfFormula {
        DnfFormula::new(
            self.constraints
                .iter()
                .flat_map(|c| c.negate())
                .map(|c| Conjunction::new([c])),
        )
    }
}

impl IntoIterator for Conjunction {
    type Item = AtomicConstraint;
    type IntoIter = std::vec::IntoIter<AtomicConstraint>;

    fn into_iter(self) -> Self::IntoIter {
        self.constraints.into_iter()
    }
}

impl fmt::Debug for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constraints.is_empty() {
            return f.write_str("true");
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

/// Disjunction of conjunctions. No disjuncts means `false`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DnfFormula {
    disjuncts: Vec<Conjunction>,
}

impl DnfFormula {
    pub fn new(disjuncts: impl IntoIterator<Item = Conjunction>) -> Self {
        let mut out = Vec::new();
        for d in disjuncts {
            if d.is_syntactically_false() {
                continue;
            }
            if d.is_true() {
                return DnfFormula::truth();
            }
            out.push(d);
        }
        out.sort();
        out.dedup();
        DnfFormula { disjuncts: out }
    }

    pub fn truth() -> Self {
        DnfFormula {
            disjuncts: vec![Conjunction::truth()],
        }
    }

    pub fn falsity() -> Self {
        DnfFormula::default()
    }

    pub fn from_conjunction(c: Conjunction) -> Self {
        DnfFormula::new([c])
    }

    pub fn from_constraints(cs: impl IntoIterator<Item = AtomicConstraint>) -> Self {
        DnfFormula::new([Conjunction::new(cs)])
    }

    pub fn disjuncts(&self) -> &[Conjunction] {
        &self.disjuncts
    }

    pub fn is_true(&self) -> bool {
        self.disjuncts.len() == 1 && self.disjuncts[0].is_true()
    }

    pub fn is_false(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn or(&self, other: &DnfFormula) -> DnfFormula {
        DnfFormula::new(self.disjuncts.iter().chain(&other.disjuncts).cloned())
    }

    /// Conjunction, distributed back into DNF.
    pub fn and(&self, other: &DnfFormula) -> DnfFormula {
        let mut out = Vec::with_capacity(self.disjuncts.len() * other.disjuncts.len());
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                out.push(a.and(b));
            }
        }
        DnfFormula::new(out)
    }

    pub fn and_conjunction(&self, c: &Conjunction) -> DnfFormula {
        DnfFormula::new(self.disjuncts.iter().map(|d| d.and(c)))
    }

    pub fn negate(&self) -> DnfFormula {
        self.disjuncts
            .iter()
            .fold(DnfFormula::truth(), |acc, d| acc.and(&d.negate()))
    }

    pub fn holds(&self, point: &Point) -> Result<bool> {
        for d in &self.disjuncts {
            if d.holds(point)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn rename(&self, map: &Renaming) -> Self {
        DnfFormula::new(self.disjuncts.iter().map(|d| d.rename(map)))
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for d in &self.disjuncts {
            for c in d.constraints() {
                c.collect_vars(&mut out);
            }
        }
        out
    }
}

impl fmt::Debug for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("false");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            if self.disjuncts.len() > 1 && d.len() > 1 {
                write!(f, "({})", d)?;
            } else {
                write!(f, "{}", d)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{rat, ratio};

    fn v(i: u32, n: &str) -> Variable {
        Variable::new(i, n)
    }

    fn lt(pairs: &[(u32, i64)], c: i64) -> LinearTerm {
        LinearTerm::from_parts(
            pairs.iter().map(|(i, k)| (v(*i, "v"), rat(*k))),
            rat(c),
        )
    }

    #[test]
    fn moves_to_canonical_side() {
        // 10 <= x  ~>  x - 10 >= 0
        let x = v(0, "x");
        let c = AtomicConstraint::le(LinearTerm::constant(rat(10)), LinearTerm::var(x.clone()));
        assert_eq!(c.relation(), Relation::Ge);
        assert_eq!(c.term(), &LinearTerm::from_parts([(x, rat(1))], rat(-10)));
    }

    #[test]
    fn identity_equality_is_trivial() {
        let x = LinearTerm::var(v(0, "x"));
        let c = AtomicConstraint::eq(x.clone(), x);
        assert_eq!(c.term(), &LinearTerm::zero());
        assert_eq!(c.relation(), Relation::Eq);
        assert!(c.is_trivially_true());
    }

    #[test]
    fn scaled_equality_is_divided_by_lead() {
        // 2w - 2u - 2v = 0 with u < v < w by index
        let c = AtomicConstraint::new(lt(&[(2, 2), (0, -2), (1, -2)], 0), Relation::Eq);
        assert_eq!(c.term(), &lt(&[(2, -1), (0, 1), (1, 1)], 0));
        // inequalities keep direction
        let d = AtomicConstraint::new(lt(&[(0, -4), (1, 2)], 6), Relation::Ge);
        assert_eq!(d.term(), &LinearTerm::from_parts(
            [(v(0, "v"), rat(-1)), (v(1, "v"), ratio(1, 2))],
            ratio(3, 2),
        ));
    }

    #[test]
    fn normalization_is_idempotent() {
        let c = AtomicConstraint::new(lt(&[(3, -6), (5, 9)], 4), Relation::Gt);
        assert_eq!(AtomicConstraint::new(c.term().clone(), c.relation()), c);
    }

    #[test]
    fn strictness_at_boundary() {
        let x = v(0, "x");
        let ge = DnfFormula::from_constraints([AtomicConstraint::ge(
            LinearTerm::var(x.clone()),
            LinearTerm::constant(rat(10)),
        )]);
        let gt = DnfFormula::from_constraints([AtomicConstraint::gt(
            LinearTerm::var(x.clone()),
            LinearTerm::constant(rat(10)),
        )]);
        let p: Point = [(x, rat(10))].into_iter().collect();
        assert!(ge.holds(&p).unwrap());
        assert!(!gt.holds(&p).unwrap());
    }

    #[test]
    fn evaluates_worked_body() {
        let (a, b, c) = (v(0, "a"), v(1, "b"), v(2, "c"));
        let body = DnfFormula::from_constraints([
            AtomicConstraint::ge(LinearTerm::var(a.clone()), LinearTerm::constant(rat(10))),
            AtomicConstraint::eq(
                LinearTerm::var(c.clone()),
                LinearTerm::var(a.clone()).plus(&LinearTerm::var(b.clone())),
            ),
            AtomicConstraint::le(LinearTerm::var(b.clone()), LinearTerm::zero()),
        ]);
        let p: Point = [(a, rat(10)), (b, rat(0)), (c, rat(10))].into_iter().collect();
        assert!(body.holds(&p).unwrap());
    }

    #[test]
    fn dnf_truth_and_falsity() {
        assert!(DnfFormula::new([Conjunction::falsity()]).is_false());
        assert!(DnfFormula::new([Conjunction::falsity(), Conjunction::truth()]).is_true());
        assert!(DnfFormula::falsity().negate().is_true());
        assert!(DnfFormula::truth().negate().is_false());
    }

    #[test]
    fn negating_equality_splits() {
        let c = AtomicConstraint::new(lt(&[(0, 1)], -3), Relation::Eq);
        let n = c.negate();
        assert_eq!(n.len(), 2);
        assert!(n.iter().all(|a| a.relation() == Relation::Gt));
    }

    #[test]
    fn conjunction_dedups_and_drops_trivia() {
        let a = AtomicConstraint::new(lt(&[(0, 1)], 0), Relation::Ge);
        let t = AtomicConstraint::new(LinearTerm::constant(rat(2)), Relation::Ge);
        let c = Conjunction::new([a.clone(), t, a.clone()]);
        assert_eq!(c.constraints(), &[a]);
    }
}
