//! The capacity zoo and the generic set-function machinery built on it.
//!
//! A [`Capacity`] is a lazy evaluator over [`SubsetMask`]s; a
//! [`DenseSetFunction`] materialises it for exhaustive checks on small spaces.

mod dense;
mod weights;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::json;

pub use dense::{DenseSetFunction, DENSE_CAP};
pub use weights::{WeightVector, WEIGHT_SUM_TOL};

use crate::finite_space::{FiniteMetricSpace, Rational, SubsetMask};
use crate::numeric::{big_to_f64, to_big, to_f64};
use crate::{Error, Result, VALUE_TOL};

pub type Evaluator = Arc<dyn Fn(&SubsetMask) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CapacityKind {
    Measure(WeightVector),
    SupOfMeasures(Vec<WeightVector>),
    /// `v(A) = min(mu(A^δ̄) + eps, 1)` for nonempty `A`, `v(∅) = 0`.
    Huber {
        mu: WeightVector,
        eps: Rational,
        delta: Rational,
    },
    Dense(DenseSetFunction),
    /// `v(A \ O) / v(X \ O)`.
    Restricted {
        base: Box<Capacity>,
        removed: SubsetMask,
        normalizer: f64,
    },
    Custom {
        name: String,
        eval: Evaluator,
    },
}

impl fmt::Debug for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityKind::Measure(w) => f.debug_tuple("Measure").field(w).finish(),
            CapacityKind::SupOfMeasures(ws) => f.debug_tuple("SupOfMeasures").field(ws).finish(),
            CapacityKind::Huber { mu, eps, delta } => f
                .debug_struct("Huber")
                .field("mu", mu)
                .field("eps", eps)
                .field("delta", delta)
                .finish(),
            CapacityKind::Dense(d) => f.debug_tuple("Dense").field(d).finish(),
            CapacityKind::Restricted { base, removed, .. } => f
                .debug_struct("Restricted")
                .field("base", base)
                .field("removed", removed)
                .finish(),
            CapacityKind::Custom { name, .. } => f.debug_tuple("Custom").field(name).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Capacity {
    space: Arc<FiniteMetricSpace>,
    kind: CapacityKind,
}

impl Capacity {
    fn build(space: Arc<FiniteMetricSpace>, kind: CapacityKind) -> Result<Self> {
        let cap = Capacity { space, kind };
        let n = cap.space.len();
        let bottom = cap.evaluate(&SubsetMask::empty(n));
        let top = cap.evaluate(&SubsetMask::full(n));
        if bottom.abs() > VALUE_TOL || (top - 1.0).abs() > VALUE_TOL {
            return Err(Error::invalid(format!(
                "not normalised: v(∅) = {bottom}, v(X) = {top}"
            )));
        }
        Ok(cap)
    }

    fn check_weights(space: &FiniteMetricSpace, w: &WeightVector) -> Result<()> {
        if w.len() != space.len() {
            return Err(Error::invalid(format!(
                "weight vector has {} entries for a space of {} points",
                w.len(),
                space.len()
            )));
        }
        Ok(())
    }

    pub fn measure(space: Arc<FiniteMetricSpace>, w: WeightVector) -> Result<Self> {
        Self::check_weights(&space, &w)?;
        Self::build(space, CapacityKind::Measure(w))
    }

    pub fn sup_of_measures(space: Arc<FiniteMetricSpace>, measures: Vec<WeightVector>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::invalid("sup of measures needs at least one measure"));
        }
        for w in &measures {
            Self::check_weights(&space, w)?;
        }
        Self::build(space, CapacityKind::SupOfMeasures(measures))
    }

    /// The ε-δ contamination capacity. `eps = 0` is accepted and gives
    /// `mu(A^δ̄)` on nonempty sets.
    pub fn huber(
        space: Arc<FiniteMetricSpace>,
        mu: WeightVector,
        eps: Rational,
        delta: Rational,
    ) -> Result<Self> {
        Self::check_weights(&space, &mu)?;
        if eps.is_negative() || eps > Rational::one() {
            return Err(Error::invalid(format!("huber eps must lie in [0, 1], got {eps}")));
        }
        if !delta.is_positive() {
            return Err(Error::invalid(format!("huber delta must be > 0, got {delta}")));
        }
        Self::build(space, CapacityKind::Huber { mu, eps, delta })
    }

    pub fn dense(space: Arc<FiniteMetricSpace>, table: DenseSetFunction) -> Result<Self> {
        if table.n() != space.len() {
            return Err(Error::invalid("dense table size does not match the space"));
        }
        Self::build(space, CapacityKind::Dense(table))
    }

    pub fn custom(
        space: Arc<FiniteMetricSpace>,
        name: impl Into<String>,
        eval: impl Fn(&SubsetMask) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(
            space,
            CapacityKind::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
        )
    }

    /// `ṽ(A) = v(A \ O) / v(X \ O)`. Fails with
    /// [`Error::DegenerateRestriction`] when `v(X \ O) = 0`.
    pub fn restrict_normalize(&self, o: &SubsetMask) -> Result<Capacity> {
        let normalizer = self.evaluate(&o.complement());
        if normalizer <= 0.0 {
            return Err(Error::DegenerateRestriction);
        }
        Self::build(
            self.space.clone(),
            CapacityKind::Restricted {
                base: Box::new(self.clone()),
                removed: o.clone(),
                normalizer,
            },
        )
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn kind(&self) -> &CapacityKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn evaluate(&self, a: &SubsetMask) -> f64 {
        debug_assert_eq!(a.len(), self.space.len());
        match &self.kind {
            CapacityKind::Measure(w) => w.mass(a),
            CapacityKind::SupOfMeasures(ws) => ws.iter().map(|w| w.mass(a)).fold(0.0, f64::max),
            CapacityKind::Huber { mu, eps, delta } => {
                if a.is_empty() {
                    return 0.0;
                }
                let nb = self.space.closed_neighborhood(a, *delta);
                huber_value(mu, &nb, *eps)
            }
            CapacityKind::Dense(d) => d.get(a.bits().expect("dense capacities have n <= 20")),
            CapacityKind::Restricted {
                base,
                removed,
                normalizer,
            } => base.evaluate(&a.difference(removed)) / normalizer,
            CapacityKind::Custom { eval, .. } => eval(a),
        }
    }

    /// Evaluates every mask of a space with `n <= 20` points.
    pub fn dense_table(&self) -> Result<DenseSetFunction> {
        let n = self.len();
        dense::check_cap(n)?;
        DenseSetFunction::from_fn(n, |bits| self.evaluate(&SubsetMask::from_bits(n, bits)))
    }

    pub fn kind_tag(&self) -> &'static str {
        match &self.kind {
            CapacityKind::Measure(_) => "measure",
            CapacityKind::SupOfMeasures(_) => "sup-of-measures",
            CapacityKind::Huber { .. } => "huber",
            CapacityKind::Dense(_) => "dense",
            CapacityKind::Restricted { .. } => "restricted",
            CapacityKind::Custom { .. } => "custom",
        }
    }

    /// Constructor parameters, for reports.
    pub fn params(&self) -> serde_json::Value {
        match &self.kind {
            CapacityKind::Measure(_) => json!({ "kind": "measure" }),
            CapacityKind::SupOfMeasures(ws) => json!({ "kind": "sup-of-measures", "m": ws.len() }),
            CapacityKind::Huber { eps, delta, .. } => json!({
                "kind": "huber",
                "eps": [eps.numer(), eps.denom()],
                "delta": [delta.numer(), delta.denom()],
                "extension": "all masks treated as closed traces; v(∅) = 0",
            }),
            CapacityKind::Dense(_) => json!({ "kind": "dense" }),
            CapacityKind::Restricted { base, removed, .. } => json!({
                "kind": "restricted",
                "base": base.params(),
                "removed": removed.to_hex(),
            }),
            CapacityKind::Custom { name, .. } => json!({ "kind": "custom", "name": name }),
        }
    }

    /// The Huber contamination level, when this is a Huber capacity.
    pub fn huber_eps(&self) -> Option<Rational> {
        match &self.kind {
            CapacityKind::Huber { eps, .. } => Some(*eps),
            _ => None,
        }
    }

    /// The same capacity on relabelled points: new point `k` is old point
    /// `perm[k]`. The result is a dense capacity.
    pub fn permuted(&self, perm: &[usize]) -> Result<Capacity> {
        let n = self.len();
        let table = DenseSetFunction::from_fn(n, |bits| {
            let old = SubsetMask::from_indices(n, (0..n).filter(|k| bits >> k & 1 == 1).map(|k| perm[k]));
            self.evaluate(&old)
        })?;
        let space = Arc::new(FiniteMetricSpace::from_distance_matrix(
            n,
            (0..n * n)
                .map(|ij| self.space.dist(perm[ij / n], perm[ij % n]))
                .collect(),
            format!("{} (permuted)", self.space.label()),
        )?);
        Capacity::dense(space, table)
    }

    /// Choquet integral of `u` (one value per point).
    pub fn choquet_integral(&self, u: &[f64]) -> f64 {
        choquet_integral(self, u)
    }
}

/// `min(mu(nb) + eps, 1)`, deciding saturation exactly when both `mu` and
/// `eps` are rational and the float sum is too close to 1 to trust.
fn huber_value(mu: &WeightVector, nb: &SubsetMask, eps: Rational) -> f64 {
    let approx = mu.mass(nb) + to_f64(eps);
    if (approx - 1.0).abs() > 1e-9 {
        return approx.min(1.0);
    }
    match mu.exact_mass(nb) {
        Some(m) => {
            let s = m + to_big(eps);
            if s >= BigRational::one() {
                1.0
            } else {
                big_to_f64(&s)
            }
        }
        None => approx.min(1.0),
    }
}

/// `min u + Σ_k (u_(k) - u_(k+1)) v({u >= u_(k)})` over the values sorted in
/// decreasing order.
///
/// # Panics
/// If `u` has the wrong length or a non-finite entry.
pub fn choquet_integral(cap: &Capacity, u: &[f64]) -> f64 {
    let n = cap.len();
    assert_eq!(u.len(), n, "u needs one value per point");
    assert!(u.iter().all(|x| x.is_finite()), "u must be finite");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then(a.cmp(&b)));
    let min = u[order[n - 1]];
    let mut level = SubsetMask::empty(n);
    let mut total = min;
    for k in 0..n - 1 {
        level.insert(order[k]);
        let step = u[order[k]] - u[order[k + 1]];
        if step != 0.0 {
            total += step * cap.evaluate(&level);
        }
    }
    total
}
