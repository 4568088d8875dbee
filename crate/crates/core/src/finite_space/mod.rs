//! Finite metric spaces with exact rational distances and the δ-neighbourhood
//! operators.
//!
//! Every comparison between a distance and a threshold is made on rationals,
//! so the strict (open) and non-strict (closed) neighbourhoods differ exactly
//! where they should: at points lying at distance exactly δ.

mod descriptor;
mod mask;

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

pub use descriptor::{Interval, SetDescriptor};
pub use mask::SubsetMask;

use crate::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;

/// Largest supported ground set.
pub const MAX_POINTS: usize = 4096;

/// Spaces up to this size have the triangle inequality checked exhaustively.
pub const METRIC_CHECK_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
enum Geometry {
    /// `x_i = start + i * step`, so `d(i, j) = |i - j| * step`.
    Grid { start: Rational, step: Rational },
    /// Points on the real line, `d(i, j) = |x_i - x_j|`.
    Line(Vec<Rational>),
    /// Explicit row-major distance matrix.
    Matrix(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    geometry: Geometry,
    label: String,
}

impl FiniteMetricSpace {
    /// `resolution` equally spaced points from `a` to `b` inclusive.
    pub fn interval_grid(resolution: usize, a: Rational, b: Rational) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        if resolution > MAX_POINTS {
            return Err(Error::SizeCap {
                what: "grid resolution",
                size: resolution,
                cap: MAX_POINTS,
            });
        }
        if a >= b {
            return Err(Error::invalid(format!("grid needs a < b, got [{a}, {b}]")));
        }
        let step = (b - a) / Rational::from_integer(resolution as i64 - 1);
        let space = FiniteMetricSpace {
            n: resolution,
            geometry: Geometry::Grid { start: a, step },
            label: format!("grid({resolution}, {a}, {b})"),
        };
        space.check_metric()?;
        Ok(space)
    }

    /// Distinct points on the real line with the absolute-difference metric.
    pub fn from_coordinates(coords: Vec<Rational>, label: impl Into<String>) -> Result<Self> {
        Self::check_size(coords.len())?;
        let space = FiniteMetricSpace {
            n: coords.len(),
            geometry: Geometry::Line(coords),
            label: label.into(),
        };
        space.check_metric()?;
        Ok(space)
    }

    /// An explicit `n x n` distance matrix, row-major.
    pub fn from_distance_matrix(
        n: usize,
        dist: Vec<Rational>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::check_size(n)?;
        if dist.len() != n * n {
            return Err(Error::invalid(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        let space = FiniteMetricSpace {
            n,
            geometry: Geometry::Matrix(dist),
            label: label.into(),
        };
        space.check_metric()?;
        Ok(space)
    }

    fn check_size(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("a metric space needs at least one point"));
        }
        if n > MAX_POINTS {
            return Err(Error::SizeCap {
                what: "point count",
                size: n,
                cap: MAX_POINTS,
            });
        }
        Ok(())
    }

    /// Zero diagonal, symmetry, positivity off the diagonal, and (for
    /// `n <= 64`) the triangle inequality over all triples.
    pub fn check_metric(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if !self.dist(i, i).is_zero() {
                return Err(Error::invalid(format!("d({i},{i}) != 0")));
            }
            for j in (i + 1)..n {
                let d = self.dist(i, j);
                if d != self.dist(j, i) {
                    return Err(Error::invalid(format!("d({i},{j}) != d({j},{i})")));
                }
                if !d.is_positive() {
                    return Err(Error::invalid(format!(
                        "d({i},{j}) = {d} but distinct points need positive distance"
                    )));
                }
            }
        }
        if n <= METRIC_CHECK_CAP {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) {
                            return Err(Error::invalid(format!(
                                "triangle inequality fails for ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Grid step, in uniform-grid mode.
    pub fn step(&self) -> Option<Rational> {
        match &self.geometry {
            Geometry::Grid { step, .. } => Some(*step),
            _ => None,
        }
    }

    /// Coordinate of point `i` on the real line, when the space has one.
    pub fn coordinate(&self, i: usize) -> Option<Rational> {
        match &self.geometry {
            Geometry::Grid { start, step } => Some(*start + *step * Rational::from_integer(i as i64)),
            Geometry::Line(c) => Some(c[i]),
            Geometry::Matrix(_) => None,
        }
    }

    pub fn coordinates(&self) -> Option<Vec<Rational>> {
        (0..self.n).map(|i| self.coordinate(i)).collect()
    }

    pub fn dist(&self, i: usize, j: usize) -> Rational {
        match &self.geometry {
            Geometry::Grid { step, .. } => {
                *step * Rational::from_integer((i as i64 - j as i64).abs())
            }
            Geometry::Line(c) => (c[i] - c[j]).abs(),
            Geometry::Matrix(d) => d[i * self.n + j],
        }
    }

    /// Smallest distance between two distinct points.
    pub fn min_positive_distance(&self) -> Option<Rational> {
        if let Some(step) = self.step() {
            return (self.n > 1).then_some(step);
        }
        let mut best: Option<Rational> = None;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    pub fn diameter(&self) -> Rational {
        if let Some(step) = self.step() {
            return step * Rational::from_integer(self.n as i64 - 1);
        }
        let mut best = Rational::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    /// `{ x : min_{y in A} d(x, y) < delta }`; empty for empty `A`.
    ///
    /// # Panics
    /// If `delta <= 0`.
    pub fn open_neighborhood(&self, a: &SubsetMask, delta: Rational) -> SubsetMask {
        assert!(delta.is_positive(), "open neighbourhood needs delta > 0");
        self.neighborhood(a, delta, true)
    }

    /// `{ x : min_{y in A} d(x, y) <= delta }`; empty for empty `A`.
    ///
    /// # Panics
    /// If `delta < 0`.
    pub fn closed_neighborhood(&self, a: &SubsetMask, delta: Rational) -> SubsetMask {
        assert!(!delta.is_negative(), "closed neighbourhood needs delta >= 0");
        self.neighborhood(a, delta, false)
    }

    /// `{ x in A : min_{y not in A} d(x, y) > delta }`, the dual of the closed
    /// neighbourhood of the complement.
    pub fn delta_shrink(&self, a: &SubsetMask, delta: Rational) -> SubsetMask {
        self.closed_neighborhood(&a.complement(), delta).complement()
    }

    fn neighborhood(&self, a: &SubsetMask, delta: Rational, strict: bool) -> SubsetMask {
        assert_eq!(a.len(), self.n, "mask over a different ground set");
        if a.is_empty() {
            return SubsetMask::empty(self.n);
        }
        match self.index_radius(delta, strict) {
            Some(r) => dilate_indices(a, r),
            None => self.neighborhood_generic(a, delta, strict),
        }
    }

    /// O(n^2) evaluation straight from the distance accessor.
    pub(crate) fn neighborhood_generic(
        &self,
        a: &SubsetMask,
        delta: Rational,
        strict: bool,
    ) -> SubsetMask {
        let members: Vec<usize> = a.iter().collect();
        SubsetMask::from_indices(
            self.n,
            (0..self.n).filter(|&x| {
                members.iter().any(|&y| within(self.dist(x, y), delta, strict))
            }),
        )
    }

    /// On a grid, `d(i, j) < delta` (or `<=`) reduces to `|i - j| <= r`.
    fn index_radius(&self, delta: Rational, strict: bool) -> Option<usize> {
        let step = self.step()?;
        let q = delta / step;
        let fl = q.floor().to_integer();
        let r = if strict && q.is_integer() { fl - 1 } else { fl };
        Some(r.clamp(0, self.n as i64) as usize)
    }

    /// All unordered pairs `(i, j)`, `i < j`, with `d(i, j) < delta`.
    pub fn pairs_closer_than(&self, delta: Rational) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if let Some(r) = self.index_radius(delta, true) {
            for i in 0..self.n {
                for j in (i + 1)..self.n.min(i + r + 1) {
                    out.push((i, j));
                }
            }
        } else {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    if self.dist(i, j) < delta {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }

    /// Trace of a continuum set description on this space.
    pub fn realize(&self, desc: &SetDescriptor) -> Result<SubsetMask> {
        descriptor::realize(self, desc)
    }

    /// Coordinate range `[min, max]`, for spaces on the line.
    pub fn coordinate_range(&self) -> Option<(Rational, Rational)> {
        let coords = self.coordinates()?;
        let lo = *coords.iter().min()?;
        let hi = *coords.iter().max()?;
        Some((lo, hi))
    }
}

fn within(d: Rational, delta: Rational, strict: bool) -> bool {
    match d.cmp(&delta) {
        Ordering::Less => true,
        Ordering::Equal => !strict,
        Ordering::Greater => false,
    }
}

/// `{ x : exists y in A, |x - y| <= r }` on index positions, in O(n).
fn dilate_indices(a: &SubsetMask, r: usize) -> SubsetMask {
    let n = a.len();
    let mut dist = vec![usize::MAX; n];
    let mut last: Option<usize> = None;
    for (x, slot) in dist.iter_mut().enumerate() {
        if a.contains(x) {
            last = Some(x);
        }
        if let Some(y) = last {
            *slot = x - y;
        }
    }
    let mut next: Option<usize> = None;
    for x in (0..n).rev() {
        if a.contains(x) {
            next = Some(x);
        }
        if let Some(y) = next {
            dist[x] = dist[x].min(y - x);
        }
    }
    SubsetMask::from_indices(n, (0..n).filter(|&x| dist[x] <= r))
}
