//! Lusin sets at grid scale.
//!
//! On a finite space every function is continuous, so continuity of `u|_K` is
//! replaced by an oscillation modulus: for `x, y ∈ K` with `d(x, y) < scale`
//! we demand `|u(x) - u(y)| <= eta`. A set `K` is feasible iff the removed set
//! `X \ K` covers every edge of the conflict graph, and the solvers minimise
//! `v(X \ K)`.
//!
//! Ties between removed sets whose values agree within [`VALUE_TOL`] go to the
//! numerically smallest removed mask.

use serde::Serialize;
use serde_json::json;

use crate::axioms::regularity_probe;
use crate::capacity::Capacity;
use crate::finite_space::{Rational, SubsetMask};
use crate::numeric::round_sig15;
use crate::{Error, Result, VALUE_TOL};

/// Largest conflict-vertex count accepted by [`exact_min_removal`].
pub const SEARCH_CAP: usize = 30;
/// Largest space accepted by [`brute_force_oracle`].
pub const ORACLE_CAP: usize = 15;

#[derive(Debug, Clone)]
pub struct LusinInstance {
    pub capacity: Capacity,
    pub u: Vec<f64>,
    pub eta: f64,
    pub scale: Rational,
}

impl LusinInstance {
    /// A negative `eta` is accepted: it turns every pair closer than `scale`
    /// into a conflict.
    pub fn new(capacity: Capacity, u: Vec<f64>, eta: f64, scale: Rational) -> Result<Self> {
        if u.len() != capacity.len() {
            return Err(Error::invalid(format!(
                "u has {} values for {} points",
                u.len(),
                capacity.len()
            )));
        }
        if u.iter().any(|x| !x.is_finite()) || !eta.is_finite() {
            return Err(Error::invalid("u and eta must be finite"));
        }
        if scale <= Rational::from_integer(0) {
            return Err(Error::invalid("scale must be positive"));
        }
        Ok(Self {
            capacity,
            u,
            eta,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Number of conflict edges with both ends in `k`.
    pub fn conflicts_within(&self, k: &SubsetMask) -> usize {
        conflict_pairs(self)
            .edges
            .iter()
            .filter(|(a, b)| k.contains(*a) && k.contains(*b))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LusinMethod {
    Exact,
    Greedy,
    Constructive,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LusinResult {
    pub k: SubsetMask,
    /// `v(X \ K)`.
    pub value: f64,
    pub method: LusinMethod,
    pub optimal: bool,
    /// Search nodes (exact), greedy steps, cells probed or masks enumerated.
    pub nodes: u64,
}

impl LusinResult {
    pub fn removed(&self) -> SubsetMask {
        self.k.complement()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "K": self.k,
            "removed": self.removed(),
            "value": round_sig15(self.value),
            "method": self.method,
            "optimal": self.optimal,
            "nodes": self.nodes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictGraph {
    /// Sorted points incident to some edge.
    pub vertices: Vec<usize>,
    /// Pairs `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl ConflictGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_cover(&self, removed: &SubsetMask) -> bool {
        self.edges.iter().all(|&(a, b)| removed.contains(a) || removed.contains(b))
    }
}

/// All pairs with `d(x, y) < scale` and `|u(x) - u(y)| > eta`.
pub fn conflict_pairs(inst: &LusinInstance) -> ConflictGraph {
    let space = inst.capacity.space();
    let edges: Vec<(usize, usize)> = space
        .pairs_closer_than(inst.scale)
        .into_iter()
        .filter(|&(a, b)| (inst.u[a] - inst.u[b]).abs() > inst.eta)
        .collect();
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    ConflictGraph { vertices, edges }
}

/// Keeps every candidate within [`VALUE_TOL`] of the best value seen and
/// resolves ties by smallest mask at the end.
#[derive(Default)]
struct Incumbents {
    best: f64,
    pool: Vec<(f64, SubsetMask)>,
}

impl Incumbents {
    fn new() -> Self {
        Self {
            best: f64::INFINITY,
            pool: Vec::new(),
        }
    }

    fn offer(&mut self, value: f64, removed: SubsetMask) {
        if value > self.best + VALUE_TOL {
            return;
        }
        if value < self.best {
            self.best = value;
            let best = self.best;
            self.pool.retain(|(v, _)| *v <= best + VALUE_TOL);
        }
        self.pool.push((value, removed));
    }

    fn winner(self) -> Option<(f64, SubsetMask)> {
        self.pool.into_iter().min_by(|a, b| a.1.cmp(&b.1))
    }
}

/// Branch-and-bound over vertex covers of the conflict graph.
///
/// At each node the lowest uncovered edge `(a, b)` splits the search into
/// "remove `a`" and "keep `a`", the latter forcing every neighbour of `a` into
/// the removed set. `v` of the partial removed set bounds every extension.
pub fn exact_min_removal(inst: &LusinInstance) -> Result<LusinResult> {
    let g = conflict_pairs(inst);
    if g.vertices.len() > SEARCH_CAP {
        return Err(Error::SearchCap {
            vertices: g.vertices.len(),
            cap: SEARCH_CAP,
        });
    }
    let n = inst.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &g.edges {
        adj[a].push(b);
        adj[b].push(a);
    }

    struct Search<'a> {
        inst: &'a LusinInstance,
        g: &'a ConflictGraph,
        adj: &'a [Vec<usize>],
        inc: Incumbents,
        nodes: u64,
    }

    impl Search<'_> {
        fn go(&mut self, removed: SubsetMask, kept: SubsetMask) {
            self.nodes += 1;
            let value = self.inst.capacity.evaluate(&removed);
            if value > self.inc.best + VALUE_TOL {
                return;
            }
            let open = self
                .g
                .edges
                .iter()
                .find(|&&(a, b)| !removed.contains(a) && !removed.contains(b));
            let Some(&(a, _)) = open else {
                self.inc.offer(value, removed);
                return;
            };
            self.go(removed.with(a), kept.clone());
            if self.adj[a].iter().any(|&x| kept.contains(x)) {
                return;
            }
            let mut forced = removed;
            for &x in &self.adj[a] {
                forced.insert(x);
            }
            self.go(forced, kept.with(a));
        }
    }

    let mut s = Search {
        inst,
        g: &g,
        adj: &adj,
        inc: Incumbents::new(),
        nodes: 0,
    };
    s.go(SubsetMask::empty(n), SubsetMask::empty(n));
    let nodes = s.nodes;
    let (value, removed) = s.inc.winner().expect("removing every conflict vertex is feasible");
    Ok(LusinResult {
        k: removed.complement(),
        value,
        method: LusinMethod::Exact,
        optimal: true,
        nodes,
    })
}

/// Repeatedly removes the vertex with the smallest capacity increase per
/// newly covered edge. `optimal` is set when the value meets the lower bound
/// `max over edges of min(v{a}, v{b})`.
pub fn greedy_removal(inst: &LusinInstance) -> LusinResult {
    let g = conflict_pairs(inst);
    let n = inst.len();
    let cap = &inst.capacity;
    let mut removed = SubsetMask::empty(n);
    let mut current = 0.0;
    let mut steps = 0u64;
    loop {
        let mut uncovered = vec![0usize; n];
        for &(a, b) in &g.edges {
            if !removed.contains(a) && !removed.contains(b) {
                uncovered[a] += 1;
                uncovered[b] += 1;
            }
        }
        let mut pick: Option<(f64, usize, f64)> = None;
        for &x in &g.vertices {
            if uncovered[x] == 0 {
                continue;
            }
            let next = cap.evaluate(&removed.with(x));
            let score = (next - current) / uncovered[x] as f64;
            if pick.is_none_or(|(s, _, _)| score < s) {
                pick = Some((score, x, next));
            }
        }
        let Some((_, x, next)) = pick else { break };
        removed.insert(x);
        current = next;
        steps += 1;
    }
    let bound = g
        .edges
        .iter()
        .map(|&(a, b)| {
            cap.evaluate(&SubsetMask::singleton(n, a))
                .min(cap.evaluate(&SubsetMask::singleton(n, b)))
        })
        .fold(0.0, f64::max);
    LusinResult {
        k: removed.complement(),
        value: current,
        method: LusinMethod::Greedy,
        optimal: current <= bound + VALUE_TOL,
        nodes: steps,
    }
}

/// `floor(u * n) / n`, corrected so that `u_n <= u < u_n + 1/n` holds in
/// floating point.
pub fn quantize_function(u: &[f64], n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("quantization level must be positive"));
    }
    let nf = f64::from(n);
    Ok(u
        .iter()
        .map(|&x| {
            let mut k = (x * nf).floor();
            if k / nf > x {
                k -= 1.0;
            }
            if (k + 1.0) / nf <= x {
                k += 1.0;
            }
            k / nf
        })
        .collect())
}

/// Level sets of `u`, ordered by their smallest point.
pub fn partition_by_value(u: &[f64]) -> Vec<SubsetMask> {
    let n = u.len();
    let mut cells: Vec<(f64, SubsetMask)> = Vec::new();
    for (i, &x) in u.iter().enumerate() {
        match cells.iter_mut().find(|(v, _)| *v == x) {
            Some((_, m)) => m.insert(i),
            None => cells.push((x, SubsetMask::singleton(n, i))),
        }
    }
    cells.into_iter().map(|(_, m)| m).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellLedger {
    /// 1-based position in the partition.
    pub cell: usize,
    pub mask: SubsetMask,
    pub value_of_u: f64,
    pub budget: f64,
    pub inner: SubsetMask,
    pub outer: SubsetMask,
    pub band_value: f64,
    pub delta: (i64, i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructiveReport {
    pub result: LusinResult,
    pub cells: Vec<CellLedger>,
    /// Number of cells whose inner sets form `K`.
    pub n_used: usize,
    /// `v(⋃ O_n \ ⋃_{n <= N} F_n)`.
    pub tail_value: f64,
    /// Smallest gap between distinct cell values; `K` is conflict-free for any
    /// `eta` below it.
    pub value_gap: Option<f64>,
    /// Smallest distance between points of `K` carrying different values;
    /// `K` is conflict-free for any `scale` up to it.
    pub separation: Option<Rational>,
    pub conflict_free_for_instance: bool,
}

impl ConstructiveReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "result": self.result.to_json(),
            "cells": self.cells.iter().map(|c| json!({
                "cell": c.cell,
                "mask": c.mask,
                "budget": round_sig15(c.budget),
                "inner": c.inner,
                "outer": c.outer,
                "band_value": round_sig15(c.band_value),
                "delta": [c.delta.0, c.delta.1],
            })).collect::<Vec<_>>(),
            "n_used": self.n_used,
            "tail_value": round_sig15(self.tail_value),
            "value_gap": self.value_gap.map(round_sig15),
            "separation": self.separation.map(|r| [*r.numer(), *r.denom()]),
            "conflict_free_for_instance": self.conflict_free_for_instance,
        })
    }
}

/// Simple-function construction: sandwich each cell `A_n` as
/// `F_n ⊆ A_n ⊆ O_n` with `v(O_n \ F_n) <= 2^{-n-2} eps_budget`, pick the
/// smallest `N` with `v(⋃ O_n \ ⋃_{n <= N} F_n) <= eps_budget / 2`, and return
/// `K = ⋃_{n <= N} F_n`.
pub fn constructive_simple(
    inst: &LusinInstance,
    partition: &[SubsetMask],
    eps_budget: f64,
    shrink_schedule: &[Rational],
) -> Result<ConstructiveReport> {
    let n = inst.len();
    let cap = &inst.capacity;
    let space = cap.space();
    if eps_budget.is_nan() || eps_budget <= 0.0 {
        return Err(Error::invalid("eps_budget must be positive"));
    }
    let mut covered = SubsetMask::empty(n);
    for cell in partition {
        if cell.len() != n {
            return Err(Error::invalid("partition cell lives on a different space"));
        }
        if !cell.is_disjoint(&covered) {
            return Err(Error::invalid("partition cells overlap"));
        }
        covered = covered.union(cell);
        let mut vals = cell.iter().map(|i| inst.u[i]);
        if let Some(first) = vals.next() {
            if vals.any(|x| x != first) {
                return Err(Error::invalid(format!("u is not constant on cell {cell:?}")));
            }
        }
    }
    if !covered.is_full() {
        return Err(Error::invalid("partition does not cover the space"));
    }

    let mut cells = Vec::with_capacity(partition.len());
    for (idx, cell) in partition.iter().enumerate() {
        let k = idx + 1;
        let budget = eps_budget * 0.5f64.powi(k as i32 + 2);
        let probe = regularity_probe(space, cap, cell, budget, shrink_schedule)?;
        if !probe.achieved {
            return Err(Error::ConstructionInfeasible {
                cell: k,
                mask: format!("{cell:?}"),
                budget,
                best: probe.value,
            });
        }
        cells.push(CellLedger {
            cell: k,
            mask: cell.clone(),
            value_of_u: cell.iter().next().map(|i| inst.u[i]).unwrap_or(f64::NAN),
            budget,
            inner: probe.inner,
            outer: probe.outer,
            band_value: probe.value,
            delta: (*probe.delta.numer(), *probe.delta.denom()),
        });
    }

    let outer_union = cells
        .iter()
        .fold(SubsetMask::empty(n), |acc, c| acc.union(&c.outer));
    let mut k_set = SubsetMask::empty(n);
    let mut chosen: Option<(usize, f64)> = None;
    let mut last_tail = cap.evaluate(&outer_union);
    if last_tail <= eps_budget / 2.0 {
        chosen = Some((0, last_tail));
    }
    if chosen.is_none() {
        for (idx, c) in cells.iter().enumerate() {
            k_set = k_set.union(&c.inner);
            last_tail = cap.evaluate(&outer_union.difference(&k_set));
            if last_tail <= eps_budget / 2.0 {
                chosen = Some((idx + 1, last_tail));
                break;
            }
        }
    }
    let Some((n_used, tail_value)) = chosen else {
        return Err(Error::ConstructionBound {
            stage: "tail",
            value: last_tail,
            bound: eps_budget / 2.0,
        });
    };
    let k_set = cells[..n_used]
        .iter()
        .fold(SubsetMask::empty(n), |acc, c| acc.union(&c.inner));
    let value = cap.evaluate(&k_set.complement());
    if value > eps_budget {
        return Err(Error::ConstructionBound {
            stage: "total",
            value,
            bound: eps_budget,
        });
    }

    let mut levels: Vec<f64> = cells[..n_used].iter().map(|c| c.value_of_u).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let value_gap = levels.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
    let mut separation: Option<Rational> = None;
    let pts: Vec<usize> = k_set.iter().collect();
    for (x, &i) in pts.iter().enumerate() {
        for &j in &pts[x + 1..] {
            if inst.u[i] != inst.u[j] {
                let d = space.dist(i, j);
                if separation.is_none_or(|s| d < s) {
                    separation = Some(d);
                }
            }
        }
    }
    let conflict_free_for_instance = inst.conflicts_within(&k_set) == 0;
    Ok(ConstructiveReport {
        result: LusinResult {
            k: k_set,
            value,
            method: LusinMethod::Constructive,
            optimal: false,
            nodes: partition.len() as u64,
        },
        cells,
        n_used,
        tail_value,
        value_gap,
        separation,
        conflict_free_for_instance,
    })
}

/// Enumerates all `2^n` candidate sets (`n <= 15`).
pub fn brute_force_oracle(inst: &LusinInstance) -> Result<LusinResult> {
    let n = inst.len();
    if n > ORACLE_CAP {
        return Err(Error::SizeCap {
            what: "brute-force oracle",
            size: n,
            cap: ORACLE_CAP,
        });
    }
    let g = conflict_pairs(inst);
    let edge_bits: Vec<u64> = g.edges.iter().map(|&(a, b)| 1u64 << a | 1u64 << b).collect();
    let full = (1u64 << n) - 1;
    let mut feasible = Vec::new();
    for removed in 0..=full {
        let kept = full & !removed;
        if edge_bits.iter().all(|&e| kept & e != e) {
            let v = inst.capacity.evaluate(&SubsetMask::from_bits(n, removed));
            feasible.push((v, removed));
        }
    }
    let best = feasible.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let &(value, removed) = feasible
        .iter()
        .find(|p| p.0 <= best + VALUE_TOL)
        .expect("removing everything is feasible");
    Ok(LusinResult {
        k: SubsetMask::from_bits(n, full & !removed),
        value,
        method: LusinMethod::Oracle,
        optimal: true,
        nodes: full + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::WeightVector;
    use crate::finite_space::FiniteMetricSpace;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn grid(n: usize) -> Arc<FiniteMetricSpace> {
        Arc::new(FiniteMetricSpace::interval_grid(n, q(0, 1), q(1, 1)).unwrap())
    }

    fn indicator(n: usize, at: usize) -> Vec<f64> {
        (0..n).map(|i| if i == at { 1.0 } else { 0.0 }).collect()
    }

    fn huber11() -> Capacity {
        Capacity::huber(grid(11), WeightVector::uniform(11), q(1, 10), q(3, 20)).unwrap()
    }

    #[test]
    fn conflict_examples() {
        let inst = LusinInstance::new(huber11(), indicator(11, 0), 0.5, q(1, 4)).unwrap();
        assert_eq!(conflict_pairs(&inst).edges, vec![(0, 1), (0, 2)]);
        let flat = LusinInstance::new(huber11(), vec![0.3; 11], 0.0, q(1, 1)).unwrap();
        assert!(conflict_pairs(&flat).is_empty());
        let slack = LusinInstance::new(huber11(), indicator(11, 4), 1.0, q(1, 1)).unwrap();
        assert!(conflict_pairs(&slack).is_empty());
    }

    #[test]
    fn exact_examples() {
        let inst = LusinInstance::new(huber11(), indicator(11, 0), 0.5, q(1, 4)).unwrap();
        let r = exact_min_removal(&inst).unwrap();
        assert_eq!(r.removed(), SubsetMask::singleton(11, 0));
        assert!((r.value - 31.0 / 110.0).abs() < 1e-12);
        let alt = inst.capacity.evaluate(&SubsetMask::from_indices(11, [1, 2]));
        assert!((alt - 51.0 / 110.0).abs() < 1e-12);
        assert_eq!(brute_force_oracle(&inst).unwrap().k, r.k);

        let m = Capacity::measure(grid(11), WeightVector::uniform(11)).unwrap();
        let inst = LusinInstance::new(m, indicator(11, 0), 0.5, q(1, 4)).unwrap();
        let r = exact_min_removal(&inst).unwrap();
        assert_eq!(r.removed(), SubsetMask::singleton(11, 0));
        assert!((r.value - 1.0 / 11.0).abs() < 1e-12);

        let flat = LusinInstance::new(huber11(), vec![0.0; 11], 0.5, q(1, 4)).unwrap();
        let r = exact_min_removal(&flat).unwrap();
        assert!(r.k.is_full());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn greedy_examples() {
        let inst = LusinInstance::new(huber11(), indicator(11, 0), 0.5, q(1, 4)).unwrap();
        let r = greedy_removal(&inst);
        assert_eq!(r.removed(), SubsetMask::singleton(11, 0));
        assert_eq!(r.value, exact_min_removal(&inst).unwrap().value);

        let m = Capacity::measure(grid(5), WeightVector::uniform(5)).unwrap();
        let u = vec![5.0, 0.0, 1.0, 0.0, 5.0];
        let inst = LusinInstance::new(m, u, 0.5, q(1, 3)).unwrap();
        let g = conflict_pairs(&inst);
        assert_eq!(g.edges, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        let r = greedy_removal(&inst);
        let e = exact_min_removal(&inst).unwrap();
        assert!(r.value >= e.value - 1e-12);
        assert!(g.is_cover(&r.removed()));

        let m = Capacity::measure(grid(3), WeightVector::uniform(3)).unwrap();
        let inst = LusinInstance::new(m, vec![0.0, 1.0, 0.0], 0.5, q(3, 4)).unwrap();
        assert_eq!(conflict_pairs(&inst).edges, vec![(0, 1), (1, 2)]);
        let r = greedy_removal(&inst);
        assert_eq!(r.removed(), SubsetMask::singleton(3, 1));
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(exact_min_removal(&inst).unwrap().removed(), r.removed());

        let flat = LusinInstance::new(huber11(), vec![0.0; 11], 0.5, q(1, 4)).unwrap();
        let r = greedy_removal(&flat);
        assert!(r.k.is_full() && r.value == 0.0 && r.optimal);
    }

    #[test]
    fn quantize_examples() {
        let u: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let v = quantize_function(&u, 2).unwrap();
        assert_eq!(v[4], 0.0);
        assert_eq!(v[5], 0.5);
        assert_eq!(v[10], 1.0);
        assert_eq!(quantize_function(&[1.0 / 3.0], 3).unwrap(), vec![1.0 / 3.0]);
        assert!(quantize_function(&u, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn quantize_sandwich(u in proptest::collection::vec(-10.0f64..10.0, 1..40), n in 1u32..500) {
            let v = quantize_function(&u, n).unwrap();
            for (a, b) in u.iter().zip(&v) {
                proptest::prop_assert!(*b <= *a);
                proptest::prop_assert!(*a < *b + 1.0 / f64::from(n));
            }
        }
    }

    #[test]
    fn constructive_examples() {
        let g = grid(11);
        let m = Capacity::measure(g.clone(), WeightVector::uniform(11)).unwrap();
        let schedule = crate::axioms::default_shrink_schedule(&g);
        let flat = LusinInstance::new(m.clone(), vec![0.25; 11], 0.5, q(1, 5)).unwrap();
        let rep = constructive_simple(&flat, &partition_by_value(&flat.u), 0.01, &schedule).unwrap();
        assert!(rep.result.k.is_full());
        assert_eq!(rep.result.value, 0.0);

        let h = Capacity::huber(g.clone(), WeightVector::uniform(11), q(1, 10), q(1, 20)).unwrap();
        let inst = LusinInstance::new(h, indicator(11, 0), 0.5, q(1, 5)).unwrap();
        match constructive_simple(&inst, &partition_by_value(&inst.u), 0.05, &schedule) {
            Err(Error::ConstructionInfeasible { cell, mask, .. }) => {
                assert_eq!(cell, 1);
                assert_eq!(mask, "{0}");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }

        let bad = vec![SubsetMask::from_indices(11, 0..6), SubsetMask::from_indices(11, 5..11)];
        assert!(constructive_simple(&flat, &bad, 0.1, &schedule).is_err());
        let uncovered = vec![SubsetMask::from_indices(11, 0..6)];
        assert!(constructive_simple(&flat, &uncovered, 0.1, &schedule).is_err());
        let mixed = LusinInstance::new(m, indicator(11, 3), 0.5, q(1, 5)).unwrap();
        assert!(constructive_simple(&mixed, &[SubsetMask::full(11)], 0.1, &schedule).is_err());
    }

    #[test]
    fn constructive_measure_succeeds_on_fine_grid() {
        let g = grid(201);
        let m = Capacity::measure(g.clone(), WeightVector::uniform(201)).unwrap();
        let u: Vec<f64> = (0..201).map(|i| if i >= 100 { 1.0 } else { 0.0 }).collect();
        let inst = LusinInstance::new(m, u, 0.5, q(1, 400)).unwrap();
        let schedule = crate::axioms::default_shrink_schedule(&g);
        let rep = constructive_simple(&inst, &partition_by_value(&inst.u), 0.1, &schedule).unwrap();
        assert!(rep.result.value <= 0.1);
        assert_eq!(rep.n_used, 2);
        assert_eq!(rep.result.k.count(), 199);
        assert_eq!(rep.separation, Some(q(3, 200)));
        assert!(rep.conflict_free_for_instance);
    }

    #[test]
    fn oracle_examples() {
        let inst = LusinInstance::new(huber11(), indicator(11, 0), 0.5, q(1, 4)).unwrap();
        let r = brute_force_oracle(&inst).unwrap();
        assert!((r.value - 31.0 / 110.0).abs() < 1e-12);
        let m = Capacity::measure(grid(6), WeightVector::uniform(6)).unwrap();
        let all = LusinInstance::new(m, vec![0.0; 6], -1.0, q(2, 1)).unwrap();
        let r = brute_force_oracle(&all).unwrap();
        assert_eq!(r.k.count(), 1);
        assert_eq!(r.k, SubsetMask::singleton(6, 5));
        assert_eq!(exact_min_removal(&all).unwrap().k, r.k);
        let big = Capacity::measure(grid(16), WeightVector::uniform(16)).unwrap();
        let inst = LusinInstance::new(big, vec![0.0; 16], 0.5, q(1, 4)).unwrap();
        assert!(matches!(brute_force_oracle(&inst), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn search_cap() {
        let m = Capacity::measure(grid(40), WeightVector::uniform(40)).unwrap();
        let u: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let inst = LusinInstance::new(m, u, 0.5, q(1, 20)).unwrap();
        assert!(matches!(exact_min_removal(&inst), Err(Error::SearchCap { vertices: 40, .. })));
        let r = greedy_removal(&inst);
        assert_eq!(inst.conflicts_within(&r.k), 0);
    }

    #[test]
    fn result_json() {
        let inst = LusinInstance::new(huber11(), indicator(11, 0), 0.5, q(1, 4)).unwrap();
        let j = exact_min_removal(&inst).unwrap().to_json();
        assert_eq!(j["removed"], "0x001");
        assert_eq!(j["K"], "0x7fe");
        assert_eq!(j["method"], "exact");
        assert_eq!(j["value"], 0.281818181818182);
    }
}
