//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every entry point takes a JSON request and returns a JSON document. The
//! plain `*_json` functions carry the logic so they can be tested natively.

use std::sync::Arc;

use capacity_lab::experiments::chain::{continuity_gap, ChainScenario};
use capacity_lab::experiments::config::{CapacitySpec, ChainSpec, Depth, GridSpec, Harmonic, Q};
use capacity_lab::lusin::{conflict_pairs, exact_min_removal, greedy_removal, LusinInstance};
use capacity_lab::numeric::round_sig15;
use capacity_lab::{FiniteMetricSpace, Interval, Rational, SetDescriptor, SubsetMask};
use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request.
pub const MAX_RESOLUTION: usize = 2001;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check_resolution(r: usize) -> Result<(), String> {
    if (2..=MAX_RESOLUTION).contains(&r) {
        Ok(())
    } else {
        Err(format!("resolution must lie in 2..={MAX_RESOLUTION}"))
    }
}

fn unit_grid(r: usize) -> Result<Arc<FiniteMetricSpace>, String> {
    check_resolution(r)?;
    FiniteMetricSpace::interval_grid(r, Rational::from_integer(0), Rational::from_integer(1))
        .map(Arc::new)
        .map_err(fail)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GapRequest {
    capacity: CapacitySpec,
    resolutions: Vec<usize>,
    /// Include the right endpoint: `(0, 1/k]` instead of `(0, 1/k)`.
    #[serde(default)]
    right_closed: bool,
}

/// `v(O_k) - v(∅)` along `O_k = (0, 1/k)` for each requested resolution.
pub fn gap_curves_json(request: &str) -> Result<String, String> {
    let req: GapRequest = serde_json::from_str(request).map_err(fail)?;
    req.resolutions.iter().try_for_each(|&r| check_resolution(r))?;
    let grid = GridSpec {
        resolutions: req.resolutions.clone(),
        interval: [Q::new(0, 1), Q::new(1, 1)],
    };
    grid.validate().map_err(fail)?;
    let g = continuity_gap(&ChainScenario {
        grid,
        capacity: req.capacity,
        chain: ChainSpec::Harmonic(Harmonic {
            lo: Q::new(0, 1),
            span: Q::new(1, 1),
            lo_closed: false,
            hi_closed: req.right_closed,
        }),
        limit: SetDescriptor::Empty,
        depth: Depth::Resolution,
    })
    .map_err(fail)?;
    let curves: Vec<Value> = g
        .per_resolution
        .iter()
        .map(|s| {
            let rows: Vec<&_> = g.rows.iter().filter(|r| r.resolution == s.resolution).collect();
            json!({
                "resolution": s.resolution,
                "k": rows.iter().map(|r| r.k).collect::<Vec<_>>(),
                "gap": rows.iter().map(|r| round_sig15(r.gap)).collect::<Vec<_>>(),
                "inf_gap_before_collapse": s.inf_gap_before_collapse.map(round_sig15),
                "collapse_k": s.collapse_k,
            })
        })
        .collect();
    Ok(json!({ "formulation": g.formulation, "curves": curves }).to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LusinRequest {
    capacity: CapacitySpec,
    resolution: usize,
    /// Index of the point carrying `u = 1`.
    point: usize,
    eta: f64,
    /// Scale as a multiple of the grid step.
    scale_steps: i64,
}

/// Exact and greedy Lusin sets for the indicator of one grid point.
pub fn lusin_optimum_json(request: &str) -> Result<String, String> {
    let req: LusinRequest = serde_json::from_str(request).map_err(fail)?;
    let space = unit_grid(req.resolution)?;
    if req.point >= req.resolution {
        return Err("point lies outside the grid".into());
    }
    if req.scale_steps < 1 {
        return Err("scale_steps must be at least 1".into());
    }
    let cap = req.capacity.build(space.clone()).map_err(fail)?;
    let u: Vec<f64> = (0..req.resolution).map(|i| if i == req.point { 1.0 } else { 0.0 }).collect();
    let scale = space.step().expect("grid") * Rational::from_integer(req.scale_steps);
    let inst = LusinInstance::new(cap, u, req.eta, scale).map_err(fail)?;
    let graph = conflict_pairs(&inst);
    let exact = exact_min_removal(&inst).map_err(fail)?;
    let greedy = greedy_removal(&inst);
    Ok(json!({
        "edges": graph.edges,
        "exact": {
            "removed": exact.removed().iter().collect::<Vec<_>>(),
            "value": round_sig15(exact.value),
            "nodes": exact.nodes,
        },
        "greedy": {
            "removed": greedy.removed().iter().collect::<Vec<_>>(),
            "value": round_sig15(greedy.value),
        },
    })
    .to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NeighborhoodRequest {
    resolution: usize,
    /// Closed interval `[lo, hi]` as `[num, den]` pairs.
    lo: Q,
    hi: Q,
    delta: Q,
}

/// Open and closed δ-neighbourhoods and the δ-shrink of a closed interval.
pub fn neighborhoods_json(request: &str) -> Result<String, String> {
    let req: NeighborhoodRequest = serde_json::from_str(request).map_err(fail)?;
    let space = unit_grid(req.resolution)?;
    if req.delta.0 <= Rational::from_integer(0) {
        return Err("delta must be positive".into());
    }
    let iv = Interval::closed(req.lo.0, req.hi.0).map_err(fail)?;
    let a = space.realize(&SetDescriptor::interval(iv)).map_err(fail)?;
    let list = |m: &SubsetMask| m.iter().collect::<Vec<_>>();
    Ok(json!({
        "set": list(&a),
        "open": list(&space.open_neighborhood(&a, req.delta.0)),
        "closed": list(&space.closed_neighborhood(&a, req.delta.0)),
        "shrink": list(&space.delta_shrink(&a, req.delta.0)),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn gap_curves(request: &str) -> Result<String, JsValue> {
    gap_curves_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lusin_optimum(request: &str) -> Result<String, JsValue> {
    lusin_optimum_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn neighborhoods(request: &str) -> Result<String, JsValue> {
    neighborhoods_json(request).map_err(|e| JsValue::from_str(&e))
}
