use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Sub};

use num_traits::Zero;

use crate::logic::Rational;

/// `real + eps·ε` for a positive infinitesimal ε, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Delta {
    pub real: Rational,
    pub eps: Rational,
}

impl Delta {
    pub fn new(real: Rational, eps: Rational) -> Self {
        Delta { real, eps }
    }

    pub fn real(real: Rational) -> Self {
        Delta {
            real,
            eps: Rational::zero(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Delta {
        Delta {
            real: &self.real * k,
            eps: &self.eps * k,
        }
    }

    pub fn div(&self, k: &Rational) -> Delta {
        Delta {
            real: &self.real / k,
            eps: &self.eps / k,
        }
    }

    /// The concrete value for a given choice of ε.
    pub fn at(&self, eps: &Rational) -> Rational {
        &self.real + &self.eps * eps
    }
}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delta {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real
            .cmp(&other.real)
            .then_with(|| self.eps.cmp(&other.eps))
    }
}

impl Add<&Delta> for &Delta {
    type Output = Delta;

    fn add(self, rhs: &Delta) -> Delta {
        Delta {
            real: &self.real + &rhs.real,
            eps: &self.eps + &rhs.eps,
        }
    }
}

impl Sub<&Delta> for &Delta {
    type Output = Delta;

    fn sub(self, rhs: &Delta) -> Delta {
        Delta {
            real: &self.real - &rhs.real,
            eps: &self.eps - &rhs.eps,
        }
    }
}

impl AddAssign<&Delta> for Delta {
    fn add_assign(&mut self, rhs: &Delta) {
        self.real += &rhs.real;
        self.eps += &rhs.eps;
    }
}
