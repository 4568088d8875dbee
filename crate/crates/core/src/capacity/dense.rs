use serde::Serialize;

use crate::{Error, Result};

/// Largest ground set for exhaustive 2^n materialisation.
pub const DENSE_CAP: usize = 20;

/// A set function on `n <= 20` points stored as a table indexed by mask bits.
///
/// The table may hold signed values (Möbius masses); the capacity-specific
/// invariants are checked by [`crate::axioms::check_capacity_axioms`], not here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseSetFunction {
    n: usize,
    table: Vec<f64>,
}

impl DenseSetFunction {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        check_cap(n)?;
        if table.len() != 1 << n {
            return Err(Error::invalid(format!(
                "table has {} entries, expected 2^{n} = {}",
                table.len(),
                1usize << n
            )));
        }
        Ok(DenseSetFunction { n, table })
    }

    pub fn from_fn(n: usize, f: impl FnMut(u64) -> f64) -> Result<Self> {
        check_cap(n)?;
        Ok(DenseSetFunction {
            n,
            table: (0..1u64 << n).map(f).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    #[inline]
    pub fn get(&self, mask: u64) -> f64 {
        self.table[mask as usize]
    }

    /// `m(S) = Σ_{T ⊆ S} (-1)^{|S \ T|} v(T)`, via the subset-sum recurrence.
    pub fn mobius(&self) -> DenseSetFunction {
        let mut t = self.table.clone();
        for bit in 0..self.n {
            let b = 1usize << bit;
            for s in 0..t.len() {
                if s & b != 0 {
                    t[s] -= t[s ^ b];
                }
            }
        }
        DenseSetFunction { n: self.n, table: t }
    }

    /// `v(S) = Σ_{T ⊆ S} m(T)`, the inverse of [`Self::mobius`].
    pub fn zeta(&self) -> DenseSetFunction {
        let mut t = self.table.clone();
        for bit in 0..self.n {
            let b = 1usize << bit;
            for s in 0..t.len() {
                if s & b != 0 {
                    t[s] += t[s ^ b];
                }
            }
        }
        DenseSetFunction { n: self.n, table: t }
    }

    pub fn max_abs_diff(&self, other: &DenseSetFunction) -> f64 {
        assert_eq!(self.n, other.n);
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        return Err(Error::SizeCap {
            what: "dense table",
            size: n,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}
