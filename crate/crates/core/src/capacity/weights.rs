use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::finite_space::{Rational, SubsetMask};
use crate::numeric::{to_big, to_f64};
use crate::{Error, Result};

/// Sum-to-one tolerance for floating weight vectors.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A probability vector over the points of a finite space.
///
/// Vectors built from rationals keep the exact weights alongside the floats so
/// that saturation tests such as `mu(A) + eps >= 1` can be decided exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl WeightVector {
    pub fn from_f64(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::invalid("weight vector is empty"));
        }
        if let Some((i, x)) = w.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!("weight {i} is {x}, must be finite and >= 0")));
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(format!("weights sum to {s}, expected 1")));
        }
        Ok(WeightVector { w, exact: None })
    }

    pub fn from_rationals(r: Vec<Rational>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::invalid("weight vector is empty"));
        }
        if let Some((i, x)) = r.iter().enumerate().find(|(_, x)| x.is_negative()) {
            return Err(Error::invalid(format!("weight {i} is {x}, must be >= 0")));
        }
        let s = r.iter().fold(BigRational::zero(), |acc, x| acc + to_big(*x));
        if !s.is_one() {
            return Err(Error::invalid(format!("weights sum to {s}, expected 1")));
        }
        Ok(WeightVector {
            w: r.iter().map(|x| to_f64(*x)).collect(),
            exact: Some(r),
        })
    }

    /// Weights proportional to arbitrary nonnegative integers.
    pub fn proportional(counts: &[i64]) -> Result<Self> {
        let total: i64 = counts.iter().sum();
        if total <= 0 {
            return Err(Error::invalid("proportional weights need a positive total"));
        }
        Self::from_rationals(counts.iter().map(|&c| Rational::new(c, total)).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self::proportional(&vec![1; n]).expect("n >= 1")
    }

    /// Linearly decreasing weights `w_i ∝ n - i`, heaviest at the first point.
    pub fn triangular(n: usize) -> Self {
        let counts: Vec<i64> = (0..n).map(|i| (n - i) as i64).collect();
        Self::proportional(&counts).expect("n >= 1")
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let counts: Vec<i64> = (0..n).map(|i| i64::from(i == at)).collect();
        Self::proportional(&counts).expect("at < n")
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn mass(&self, a: &SubsetMask) -> f64 {
        a.iter().map(|i| self.w[i]).sum()
    }

    pub fn exact_mass(&self, a: &SubsetMask) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        Some(a.iter().fold(BigRational::zero(), |acc, i| acc + to_big(exact[i])))
    }

    /// The same measure with point labels permuted: new point `k` carries the
    /// weight of old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        WeightVector {
            w: perm.iter().map(|&p| self.w[p]).collect(),
            exact: self.exact.as_ref().map(|e| perm.iter().map(|&p| e[p]).collect()),
        }
    }
}
