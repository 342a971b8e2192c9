//! General simplex over δ-rationals with Bland's rule.
//!
//! Every non-constant constraint `L(x) + c ⊳ 0` gets a slack column
//! `s = L(x)` bounded by `s ≥ -c` (`s ≥ -c + ε` when strict, `s = -c` for
//! equalities). Original variables are unbounded. A failing row yields the
//! Farkas combination directly: weight `±1` on the violated slack and `∓a`
//! on every nonbasic slack `a` of the row.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::delta::Delta;
use super::FarkasCertificate;
use crate::logic::{AtomicConstraint, Point, Rational, Relation, Variable};

pub(crate) enum Outcome {
    Sat(Point),
    Unsat(FarkasCertificate),
}

struct Tableau {
    /// `rows[r]`: the basic variable of row `r` as a combination of columns.
    rows: Vec<Vec<Rational>>,
    basic: Vec<usize>,
    row_of: Vec<Option<usize>>,
    lower: Vec<Option<Delta>>,
    upper: Vec<Option<Delta>>,
    value: Vec<Delta>,
    /// Constraint index of each slack column (offset by the number of variables).
    origin: Vec<usize>,
    n_vars: usize,
}

pub(crate) fn solve(constraints: &[AtomicConstraint]) -> Outcome {
    // constant constraints are decided directly
    for (i, c) in constraints.iter().enumerate() {
        if c.is_trivially_false() {
            let k = c.term().constant_part();
            let w = match c.relation() {
                Relation::Eq if k.is_positive() => -Rational::one(),
                _ => Rational::one(),
            };
            return Outcome::Unsat(FarkasCertificate::from_weights([(i, w)]));
        }
    }

    let vars: Vec<Variable> = constraints
        .iter()
        .flat_map(|c| c.term().vars().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let col_of: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = vars.len();
    let rows_src: Vec<(usize, &AtomicConstraint)> = constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.term().is_constant())
        .collect();
    let m = rows_src.len();
    let width = n + m;

    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        basic: Vec::with_capacity(m),
        row_of: vec![None; width],
        lower: vec![None; width],
        upper: vec![None; width],
        value: vec![Delta::default(); width],
        origin: Vec::with_capacity(m),
        n_vars: n,
    };
    for (r, (idx, c)) in rows_src.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (v, k) in c.term().coeffs() {
            row[col_of[v]] = k.clone();
        }
        let col = n + r;
        let bound = -c.term().constant_part();
        match c.relation() {
            Relation::Ge => t.lower[col] = Some(Delta::real(bound)),
            Relation::Gt => t.lower[col] = Some(Delta::new(bound, Rational::one())),
            Relation::Eq => {
                t.lower[col] = Some(Delta::real(bound.clone()));
                t.upper[col] = Some(Delta::real(bound));
            }
        }
        t.rows.push(row);
        t.basic.push(col);
        t.row_of[col] = Some(r);
        t.origin.push(*idx);
    }

    match t.run() {
        Ok(()) => Outcome::Sat(t.model(&vars)),
        Err(cert) => Outcome::Unsat(cert),
    }
}

impl Tableau {
    fn width(&self) -> usize {
        self.value.len()
    }

    fn below_lower(&self, col: usize) -> bool {
        matches!(&self.lower[col], Some(l) if self.value[col] < *l)
    }

    fn above_upper(&self, col: usize) -> bool {
        matches!(&self.upper[col], Some(u) if self.value[col] > *u)
    }

    fn can_increase(&self, col: usize) -> bool {
        self.upper[col]
            .as_ref()
            .is_none_or(|u| self.value[col] < *u)
    }

    fn can_decrease(&self, col: usize) -> bool {
        self.lower[col]
            .as_ref()
            .is_none_or(|l| self.value[col] > *l)
    }

    fn run(&mut self) -> Result<(), FarkasCertificate> {
        loop {
            let violated = (0..self.width())
                .find(|&c| self.row_of[c].is_some() && (self.below_lower(c) || self.above_upper(c)));
            let Some(col) = violated else {
                return Ok(());
            };
            let r = self.row_of[col].unwrap();
            let raise = self.below_lower(col);
            let entering = (0..self.width()).find(|&j| {
                if self.row_of[j].is_some() {
                    return false;
                }
                let a = &self.rows[r][j];
                if a.is_zero() {
                    return false;
                }
                // direction in which x_j must move to push the basic variable
                let up = a.is_positive() == raise;
                if up {
                    self.can_increase(j)
                } else {
                    self.can_decrease(j)
                }
            });
            match entering {
                Some(j) => {
                    let target = if raise {
                        self.lower[col].clone().unwrap()
                    } else {
                        self.upper[col].clone().unwrap()
                    };
                    self.pivot_and_update(r, j, target);
                }
                None => return Err(self.explain(r, raise)),
            }
        }
    }

    fn pivot_and_update(&mut self, r: usize, j: usize, target: Delta) {
        let i = self.basic[r];
        let a = self.rows[r][j].clone();
        let theta = (&target - &self.value[i]).div(&a);
        self.value[i] = target;
        self.value[j] += &theta;
        for (k, row) in self.rows.iter().enumerate() {
            if k != r && !row[j].is_zero() {
                let b = self.basic[k];
                let inc = theta.scale(&row[j]);
                self.value[b] += &inc;
            }
        }
        self.pivot(r, j);
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let i = self.basic[r];
        let a = self.rows[r][j].clone();
        let inv = a.recip();
        let mut new_row: Vec<Rational> = self.rows[r].iter().map(|x| -(x * &inv)).collect();
        new_row[j] = Rational::zero();
        new_row[i] = inv;
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[j].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut row[j], Rational::zero());
            for (x, y) in row.iter_mut().zip(&new_row) {
                if !y.is_zero() {
                    *x += &c * y;
                }
            }
        }
        self.rows[r] = new_row;
        self.basic[r] = j;
        self.row_of[j] = Some(r);
        self.row_of[i] = None;
    }

    fn constraint_of(&self, col: usize) -> usize {
        debug_assert!(col >= self.n_vars, "conflict row mentions a free variable");
        self.origin[col - self.n_vars]
    }

    fn explain(&self, r: usize, raise: bool) -> FarkasCertificate {
        let sign = if raise {
            Rational::one()
        } else {
            -Rational::one()
        };
        let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut add = |idx: usize, w: Rational| {
            *weights.entry(idx).or_insert_with(Rational::zero) += w;
        };
        add(self.constraint_of(self.basic[r]), sign.clone());
        for (j, a) in self.rows[r].iter().enumerate() {
            if !a.is_zero() && self.row_of[j].is_none() {
                add(self.constraint_of(j), -(a * &sign));
            }
        }
        FarkasCertificate::from_weights(weights)
    }

    /// Picks a concrete ε small enough for every bound and returns the values
    /// of the original variables.
    fn model(&self, vars: &[Variable]) -> Point {
        let mut eps = Rational::one();
        for col in 0..self.width() {
            let v = &self.value[col];
            if let Some(l) = &self.lower[col] {
                if l.real < v.real && l.eps > v.eps {
                    let cand = (&v.real - &l.real) / (&l.eps - &v.eps);
                    if cand < eps {
                        eps = cand;
                    }
                }
            }
            if let Some(u) = &self.upper[col] {
                if v.real < u.real && v.eps > u.eps {
                    let cand = (&u.real - &v.real) / (&v.eps - &u.eps);
                    if cand < eps {
                        eps = cand;
                    }
                }
            }
        }
        vars.iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), self.value[i].at(&eps)))
            .collect()
    }
}
