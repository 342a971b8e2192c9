use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational. Always reduced, positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A rational variable. Identity is the index; the name is only for display.
#[derive(Clone)]
pub struct Variable {
    index: u32,
    name: Arc<str>,
}

impl Variable {
    pub fn new(index: u32, name: impl Into<Arc<str>>) -> Self {
        Variable {
            index,
            name: name.into(),
        }
    }

    /// The `i`-th formal parameter of a predicate (zero based), named `X{i+1}`.
    pub fn formal(i: usize) -> Self {
        Variable::new(i as u32, format!("X{}", i + 1))
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Variable {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for Variable {}

impl Hash for Variable {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state)
    }
}

impl PartialOrd for Variable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Variable {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index.cmp(&other.index)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name, self.index)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A point: an exact assignment of rationals to variables.
pub type Point = BTreeMap<Variable, Rational>;

/// Simultaneous variable renaming.
pub type Renaming = HashMap<Variable, Variable>;

/// `Σ coeff·var + constant`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearTerm {
    coeffs: BTreeMap<Variable, Rational>,
    constant: Rational,
}

impl LinearTerm {
    pub fn zero() -> Self {
        LinearTerm::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Variable) -> Self {
        let mut t = LinearTerm::zero();
        t.add_coeff(v, Rational::one());
        t
    }

    pub fn from_parts(
        coeffs: impl IntoIterator<Item = (Variable, Rational)>,
        constant: Rational,
    ) -> Self {
        let mut t = LinearTerm::constant(constant);
        for (v, c) in coeffs {
            t.add_coeff(v, c);
        }
        t
    }

    pub fn add_coeff(&mut self, v: Variable, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(v) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn coeffs(&self) -> &BTreeMap<Variable, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, v: &Variable) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    /// Lowest-index variable with a nonzero coefficient.
    pub fn lead(&self) -> Option<(&Variable, &Rational)> {
        self.coeffs.iter().next()
    }

    pub fn mentions(&self, v: &Variable) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.coeffs.keys()
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        out.extend(self.coeffs.keys().cloned());
    }

    pub fn plus(&self, other: &LinearTerm) -> LinearTerm {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        out
    }

    pub fn minus(&self, other: &LinearTerm) -> LinearTerm {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Rational::one());
        out
    }

    /// `self += factor * other`
    pub fn add_assign_scaled(&mut self, other: &LinearTerm, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (v, c) in &other.coeffs {
            self.add_coeff(v.clone(), c * factor);
        }
        self.constant += &other.constant * factor;
    }

    pub fn scaled(&self, factor: &Rational) -> LinearTerm {
        if factor.is_zero() {
            return LinearTerm::zero();
        }
        LinearTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * factor))
                .collect(),
            constant: &self.constant * factor,
        }
    }

    pub fn negated(&self) -> LinearTerm {
        self.scaled(&-Rational::one())
    }

    /// Replaces `v` by `replacement` everywhere.
    pub fn substitute(&self, v: &Variable, replacement: &LinearTerm) -> LinearTerm {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut out = self.clone();
                out.coeffs.remove(v);
                out.add_assign_scaled(replacement, &c);
                out
            }
        }
    }

    /// Simultaneous renaming; unmapped variables are kept.
    pub fn rename(&self, map: &Renaming) -> LinearTerm {
        let mut out = LinearTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            let target = map.get(v).cloned().unwrap_or_else(|| v.clone());
            out.add_coeff(target, c.clone());
        }
        out
    }

    pub fn eval(&self, point: &Point) -> Result<Rational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let value = point
                .get(v)
                .ok_or_else(|| Error::Input(format!("variable {} is unassigned", v)))?;
            acc += c * value;
        }
        Ok(acc)
    }
}

impl fmt::Debug for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag.is_one() {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}*{}", mag, v)?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}
