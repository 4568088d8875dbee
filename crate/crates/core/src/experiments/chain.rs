//! Decreasing chains of descriptors traced on a schedule of grids.

use serde::Serialize;

use super::config::{CapacitySpec, ChainSpec, Depth, GridSpec, SetEqualitySpec};
use crate::finite_space::{SetDescriptor, SubsetMask};
use crate::{Error, Result, VALUE_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainScenario {
    pub grid: GridSpec,
    pub capacity: CapacitySpec,
    pub chain: ChainSpec,
    pub limit: SetDescriptor,
    pub depth: Depth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub resolution: usize,
    pub k: usize,
    pub v_set: f64,
    pub v_limit: f64,
    pub gap: f64,
    pub nonempty: bool,
    /// The realized set already equals the realized limit.
    pub collapsed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionSummary {
    pub resolution: usize,
    pub inf_gap: f64,
    /// Infimum over the `k` whose realized set still differs from the limit.
    pub inf_gap_before_collapse: Option<f64>,
    /// Smallest gap among nonempty realized sets.
    pub min_gap_nonempty: Option<f64>,
    /// First `k` at which the realized set equals the limit.
    pub collapse_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// `"open"` when every descriptor of the chain is open, `"all-sets"` otherwise.
    pub formulation: &'static str,
    pub rows: Vec<GapRow>,
    pub per_resolution: Vec<ResolutionSummary>,
}

impl GapReport {
    pub fn finest(&self) -> &ResolutionSummary {
        self.per_resolution.last().expect("at least one resolution")
    }

    /// Smallest gap with a nonempty realized set across every resolution.
    pub fn min_gap_nonempty(&self) -> Option<f64> {
        self.rows.iter().filter(|r| r.nonempty).map(|r| r.gap).reduce(f64::min)
    }
}

/// Realizes the chain on one space and checks `O_k ⊇ O_{k+1} ⊇ O`.
pub fn realize_chain(
    space: &crate::FiniteMetricSpace,
    descriptors: &[SetDescriptor],
    limit: &SetDescriptor,
) -> Result<(Vec<SubsetMask>, SubsetMask)> {
    let masks = descriptors
        .iter()
        .map(|d| space.realize(d))
        .collect::<Result<Vec<_>>>()?;
    let lim = space.realize(limit)?;
    for (k, w) in masks.windows(2).enumerate() {
        if !w[1].is_subset(&w[0]) {
            return Err(Error::ScenarioInvalid(format!(
                "chain is not nested at k = {} on {} points",
                k + 2,
                space.len()
            )));
        }
    }
    for (k, m) in masks.iter().enumerate() {
        if !lim.is_subset(m) {
            return Err(Error::ScenarioInvalid(format!(
                "limit is not contained in the set at k = {} on {} points",
                k + 1,
                space.len()
            )));
        }
    }
    Ok((masks, lim))
}

/// `v(O_k) - v(O)` for every resolution and depth.
pub fn continuity_gap(sc: &ChainScenario) -> Result<GapReport> {
    let mut rows = Vec::new();
    let mut per_resolution = Vec::new();
    let mut all_open = sc.limit.is_open();
    for &r in &sc.grid.resolutions {
        let space = sc.grid.space(r)?;
        let cap = sc.capacity.build(space.clone())?;
        let descriptors = sc.chain.descriptors(sc.depth.at(r))?;
        if descriptors.is_empty() {
            return Err(Error::ScenarioInvalid("chain is empty".into()));
        }
        all_open &= descriptors.iter().all(SetDescriptor::is_open);
        let (masks, lim) = realize_chain(&space, &descriptors, &sc.limit)?;
        let v_limit = cap.evaluate(&lim);
        let start = rows.len();
        for (idx, m) in masks.iter().enumerate() {
            let v_set = cap.evaluate(m);
            let gap = v_set - v_limit;
            if gap < -VALUE_TOL {
                return Err(Error::ScenarioInvalid(format!(
                    "negative gap {gap} at k = {} on {r} points: capacity is not monotone",
                    idx + 1
                )));
            }
            rows.push(GapRow {
                resolution: r,
                k: idx + 1,
                v_set,
                v_limit,
                gap,
                nonempty: !m.is_empty(),
                collapsed: *m == lim,
            });
        }
        let here = &rows[start..];
        per_resolution.push(ResolutionSummary {
            resolution: r,
            inf_gap: here.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
            inf_gap_before_collapse: here.iter().filter(|r| !r.collapsed).map(|r| r.gap).reduce(f64::min),
            min_gap_nonempty: here.iter().filter(|r| r.nonempty).map(|r| r.gap).reduce(f64::min),
            collapse_k: here.iter().find(|r| r.collapsed).map(|r| r.k),
        });
    }
    Ok(GapReport {
        formulation: if all_open { "open" } else { "all-sets" },
        rows,
        per_resolution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetEqualityRow {
    pub resolution: usize,
    pub depth: usize,
    /// Closed δ-neighbourhood of the intersection.
    pub lhs: SubsetMask,
    /// Intersection of the closed δ-neighbourhoods.
    pub rhs: SubsetMask,
    pub equal: bool,
    /// Symmetric difference of the two sides.
    pub discrepancy: SubsetMask,
    pub matches_expected: Option<bool>,
}

pub fn set_equality(spec: &SetEqualitySpec) -> Result<Vec<SetEqualityRow>> {
    let mut out = Vec::new();
    for &r in &spec.grid.resolutions {
        let space = spec.grid.space(r)?;
        let n = space.len();
        let descriptors = spec.chain.descriptors(spec.depth.at(r))?;
        let (masks, _) = realize_chain(&space, &descriptors, &SetDescriptor::Empty)?;
        let inter = masks.iter().fold(SubsetMask::full(n), |acc, m| acc.intersection(m));
        let lhs = space.closed_neighborhood(&inter, spec.delta.0);
        let rhs = masks.iter().fold(SubsetMask::full(n), |acc, m| {
            acc.intersection(&space.closed_neighborhood(m, spec.delta.0))
        });
        let matches_expected = match &spec.expect {
            Some(d) => {
                let e = space.realize(d)?;
                Some(lhs == e && rhs == e)
            }
            None => None,
        };
        out.push(SetEqualityRow {
            resolution: r,
            depth: masks.len(),
            equal: lhs == rhs,
            discrepancy: lhs.difference(&rhs).union(&rhs.difference(&lhs)),
            lhs,
            rhs,
            matches_expected,
        });
    }
    Ok(out)
}
