//! One runner per scenario kind. Every runner returns a [`Report`] whose
//! assertions decide the exit status.

use serde_json::json;

use super::chain::{continuity_gap, set_equality, ChainScenario, GapReport};
use super::config::{
    ChainProbeSpec, CounterexampleSpec, LoadedScenario, LusinSweepSpec, PositiveCaseSpec, PropertySweepSpec,
    RunSpec, SetEqualitySpec,
};
use super::report::{cell, Assertion, Report, Table, SURROGATE_NOTE};
use crate::axioms::{check_capacity_axioms, check_subadditive_with, check_two_alternating_with, PairCheckOptions};
use crate::core_lp::{core_membership, core_nonempty, greedy_chain_measure, MembershipMode, CORE_LP_CAP};
use crate::lusin::{brute_force_oracle, conflict_pairs, exact_min_removal, greedy_removal, LusinInstance, LusinResult, ORACLE_CAP};
use crate::numeric::round_sig15;
use crate::{Error, Result, SubsetMask, VALUE_TOL};

/// Runs a loaded scenario.
pub fn run_scenario(sc: &LoadedScenario) -> Result<Report> {
    let cfg = &sc.config;
    let mut report = Report {
        name: cfg.name.clone(),
        kind: cfg.run.kind(),
        config_hash: sc.config_hash(),
        seed: cfg.seed,
        assertions: Vec::new(),
        body: json!(null),
        tables: Vec::new(),
        notes: Vec::new(),
    };
    match &cfg.run {
        RunSpec::ChainProbe(s) => run_chain_probe(s, &mut report)?,
        RunSpec::Counterexample(s) => run_counterexample(s, cfg.seed, &mut report)?,
        RunSpec::PositiveCase(s) => run_positive_case(s, cfg.seed, &mut report)?,
        RunSpec::LusinSweep(s) => run_lusin_sweep(s, sc, &mut report)?,
        RunSpec::PropertySweep(s) => run_property_sweep(s, cfg.seed, &mut report)?,
        RunSpec::SetEquality(s) => run_set_equality(s, &mut report)?,
    }
    Ok(report)
}

fn gap_table(g: &GapReport) -> Table {
    let mut t = Table::new(vec!["resolution", "k", "v_set", "v_limit", "gap", "nonempty", "collapsed"]);
    for r in &g.rows {
        t.push(vec![
            r.resolution.to_string(),
            r.k.to_string(),
            cell(r.v_set),
            cell(r.v_limit),
            cell(r.gap),
            r.nonempty.to_string(),
            r.collapsed.to_string(),
        ]);
    }
    t
}

fn gap_json(g: &GapReport) -> serde_json::Value {
    json!({
        "formulation": g.formulation,
        "per_resolution": g.per_resolution.iter().map(|s| json!({
            "resolution": s.resolution,
            "inf_gap": round_sig15(s.inf_gap),
            "inf_gap_before_collapse": s.inf_gap_before_collapse.map(round_sig15),
            "min_gap_nonempty": s.min_gap_nonempty.map(round_sig15),
            "collapse_k": s.collapse_k,
        })).collect::<Vec<_>>(),
        "rows": g.rows.len(),
    })
}

/// Finest-resolution gap infimum over the sets that still differ from the limit.
fn settled_gap(g: &GapReport) -> f64 {
    let f = g.finest();
    f.inf_gap_before_collapse.unwrap_or(f.inf_gap)
}

fn run_chain_probe(s: &ChainProbeSpec, rep: &mut Report) -> Result<()> {
    let g = continuity_gap(&ChainScenario {
        grid: s.grid.clone(),
        capacity: s.capacity.clone(),
        chain: s.chain.clone(),
        limit: s.limit.clone(),
        depth: s.depth,
    })?;
    if let Some(max) = s.max_gap {
        let v = settled_gap(&g);
        rep.assertions.push(Assertion::new(
            "finest gap infimum below bound",
            v <= max.to_f64() + VALUE_TOL,
            format!("{} <= {}", cell(v), max.0),
        ));
    }
    if let Some(min) = s.min_gap {
        let v = g.min_gap_nonempty();
        rep.assertions.push(Assertion::new(
            "every nonempty gap above bound",
            v.is_some_and(|v| v >= min.to_f64() - VALUE_TOL),
            format!("{:?} >= {}", v.map(cell), min.0),
        ));
    }
    rep.body = json!({ "gaps": gap_json(&g) });
    rep.tables.push(("gaps", gap_table(&g)));
    Ok(())
}

struct LusinRow {
    resolution: usize,
    scale: crate::Rational,
    edges: usize,
    exact: LusinResult,
    oracle: Option<LusinResult>,
    ball_bound: Option<f64>,
}

fn lusin_table(rows: &[LusinRow]) -> Table {
    let mut t = Table::new(vec![
        "resolution", "scale", "conflict_edges", "removed", "value", "nodes", "oracle_value", "ball_bound",
    ]);
    for r in rows {
        t.push(vec![
            r.resolution.to_string(),
            r.scale.to_string(),
            r.edges.to_string(),
            format!("{:?}", r.exact.removed()),
            cell(r.exact.value),
            r.exact.nodes.to_string(),
            r.oracle.as_ref().map(|o| cell(o.value)).unwrap_or_default(),
            r.ball_bound.map(cell).unwrap_or_default(),
        ]);
    }
    t
}

fn lusin_json(rows: &[LusinRow]) -> serde_json::Value {
    rows.iter()
        .map(|r| {
            json!({
                "resolution": r.resolution,
                "scale": [r.scale.numer(), r.scale.denom()],
                "conflict_edges": r.edges,
                "removed_points": r.exact.removed().iter().collect::<Vec<_>>(),
                "exact": r.exact.to_json(),
                "oracle": r.oracle.as_ref().map(LusinResult::to_json),
                "ball_bound": r.ball_bound.map(round_sig15),
            })
        })
        .collect()
}

fn lusin_schedule(
    grid: &super::config::GridSpec,
    capacity: &super::config::CapacitySpec,
    u: &super::config::UFunctionSpec,
    eta: f64,
    scale: super::config::ScaleSpec,
    seed: u64,
) -> Result<Vec<LusinRow>> {
    let mut rng = rand::SeedableRng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &r in &grid.resolutions {
        let space = grid.space(r)?;
        let cap = capacity.build(space.clone())?;
        let scale = scale.at(&space)?;
        let values = u.build(&space, &mut rng)?;
        let inst = LusinInstance::new(cap, values, eta, scale)?;
        let edges = conflict_pairs(&inst).edges.len();
        let exact = exact_min_removal(&inst)?;
        let oracle = if r <= ORACLE_CAP { Some(brute_force_oracle(&inst)?) } else { None };
        let ball_bound = match u.indicator_point(&space) {
            Some(p) => {
                let ball = space.closed_neighborhood(&SubsetMask::singleton(r, p), scale);
                let mut best: f64 = 0.0;
                for m in capacity.measures() {
                    best = best.max(m.build(r)?.mass(&ball));
                }
                Some(best)
            }
            None => None,
        };
        rows.push(LusinRow {
            resolution: r,
            scale,
            edges,
            exact,
            oracle,
            ball_bound,
        });
    }
    Ok(rows)
}

fn oracle_assertions(rows: &[LusinRow], rep: &mut Report) {
    for r in rows {
        if let Some(o) = &r.oracle {
            rep.assertions.push(Assertion::new(
                format!("exact equals brute force at resolution {}", r.resolution),
                o.value == r.exact.value && o.k == r.exact.k,
                format!("{} vs {}", cell(r.exact.value), cell(o.value)),
            ));
        }
    }
}

fn run_counterexample(s: &CounterexampleSpec, seed: u64, rep: &mut Report) -> Result<()> {
    let floor = s
        .floor
        .or(s.capacity.huber_eps())
        .ok_or_else(|| Error::Config("floor is required for non-Huber capacities".into()))?;
    let rows = lusin_schedule(&s.grid, &s.capacity, &s.u, s.eta.to_f64(), s.scale, seed)?;
    for r in &rows {
        rep.assertions.push(Assertion::new(
            format!("lusin optimum above floor at resolution {}", r.resolution),
            r.exact.value >= floor.to_f64() - VALUE_TOL,
            format!("{} >= {}", cell(r.exact.value), floor.0),
        ));
    }
    oracle_assertions(&rows, rep);
    let g = continuity_gap(&ChainScenario {
        grid: s.grid.clone(),
        capacity: s.capacity.clone(),
        chain: s.chain.clone(),
        limit: s.limit.clone(),
        depth: s.depth,
    })?;
    let min_gap = g.min_gap_nonempty();
    rep.assertions.push(Assertion::new(
        "chain gap above floor on every nonempty set",
        min_gap.is_some_and(|v| v >= floor.to_f64() - VALUE_TOL),
        format!("{:?} >= {}", min_gap.map(cell), floor.0),
    ));
    rep.body = json!({
        "floor": [floor.0.numer(), floor.0.denom()],
        "eta": [s.eta.0.numer(), s.eta.0.denom()],
        "scale": s.scale.label(),
        "lusin": lusin_json(&rows),
        "gaps": gap_json(&g),
    });
    rep.tables.push(("lusin", lusin_table(&rows)));
    rep.tables.push(("gaps", gap_table(&g)));
    rep.notes.push(SURROGATE_NOTE);
    Ok(())
}

fn run_positive_case(s: &PositiveCaseSpec, seed: u64, rep: &mut Report) -> Result<()> {
    let rows = lusin_schedule(&s.grid, &s.capacity, &s.u, s.eta.to_f64(), s.scale, seed)?;
    for r in &rows {
        if let Some(b) = r.ball_bound {
            rep.assertions.push(Assertion::new(
                format!("lusin optimum below ball mass at resolution {}", r.resolution),
                r.exact.value <= b + VALUE_TOL,
                format!("{} <= {}", cell(r.exact.value), cell(b)),
            ));
        }
    }
    let decreasing = rows.windows(2).all(|w| w[1].exact.value < w[0].exact.value);
    rep.assertions.push(Assertion::new(
        "lusin optimum strictly decreasing in resolution",
        decreasing,
        rows.iter().map(|r| cell(r.exact.value)).collect::<Vec<_>>().join(" > "),
    ));
    let last = rows.last().expect("validated nonempty").exact.value;
    rep.assertions.push(Assertion::new(
        "finest lusin optimum below target",
        last <= s.target.to_f64() + VALUE_TOL,
        format!("{} <= {}", cell(last), s.target.0),
    ));
    oracle_assertions(&rows, rep);
    let g = continuity_gap(&ChainScenario {
        grid: s.grid.clone(),
        capacity: s.capacity.clone(),
        chain: s.chain.clone(),
        limit: s.limit.clone(),
        depth: s.depth,
    })?;
    let settled = settled_gap(&g);
    rep.assertions.push(Assertion::new(
        "finest gap infimum below target",
        settled <= s.gap_target.to_f64() + VALUE_TOL,
        format!("{} <= {}", cell(settled), s.gap_target.0),
    ));
    rep.body = json!({
        "eta": [s.eta.0.numer(), s.eta.0.denom()],
        "scale": s.scale.label(),
        "lusin": lusin_json(&rows),
        "gaps": gap_json(&g),
    });
    rep.tables.push(("lusin", lusin_table(&rows)));
    rep.tables.push(("gaps", gap_table(&g)));
    rep.notes.push(SURROGATE_NOTE);
    Ok(())
}

fn run_lusin_sweep(s: &LusinSweepSpec, sc: &LoadedScenario, rep: &mut Report) -> Result<()> {
    let mut rng = sc.rng();
    let mut table = Table::new(vec![
        "resolution", "instance", "eta", "scale", "conflict_edges", "exact_value", "exact_removed", "greedy_value",
        "oracle_value",
    ]);
    let mut rows_json = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let mut cells = 0usize;
    let huber_eps = s.capacity.huber_eps().map(|q| q.to_f64());
    for &r in &s.grid.resolutions {
        let space = s.grid.space(r)?;
        let cap = s.capacity.build(space.clone())?;
        for inst_idx in 0..s.instances {
            let u = s.u.build(&space, &mut rng)?;
            // (eta, scale, exact value) for the monotonicity checks
            let mut grid_values: Vec<(f64, crate::Rational, Option<f64>)> = Vec::new();
            for eta in &s.etas {
                for scale in &s.scales {
                    let scale_q = scale.at(&space)?;
                    let inst = LusinInstance::new(cap.clone(), u.clone(), eta.to_f64(), scale_q)?;
                    let edges = conflict_pairs(&inst).edges.len();
                    let exact = match exact_min_removal(&inst) {
                        Ok(e) => Some(e),
                        Err(Error::SearchCap { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    let greedy = greedy_removal(&inst);
                    let oracle = if r <= ORACLE_CAP { Some(brute_force_oracle(&inst)?) } else { None };
                    let tag = format!("r={r} instance={inst_idx} eta={} scale={}", eta.0, scale.label());
                    cells += 1;
                    for res in exact.iter().chain([&greedy]).chain(oracle.iter()) {
                        if inst.conflicts_within(&res.k) != 0 {
                            failures.push(format!("{tag}: {:?} result has conflicts", res.method));
                        }
                    }
                    if let Some(e) = &exact {
                        if greedy.value < e.value - VALUE_TOL {
                            failures.push(format!("{tag}: greedy below exact"));
                        }
                        if let Some(o) = &oracle {
                            if o.value != e.value || o.k != e.k {
                                failures.push(format!("{tag}: exact differs from oracle"));
                            }
                        }
                        if let Some(eps) = huber_eps {
                            if edges > 0 && e.value < eps - VALUE_TOL {
                                failures.push(format!("{tag}: optimum below contamination floor"));
                            }
                        }
                    }
                    grid_values.push((eta.to_f64(), scale_q, exact.as_ref().map(|e| e.value)));
                    table.push(vec![
                        r.to_string(),
                        inst_idx.to_string(),
                        eta.0.to_string(),
                        scale_q.to_string(),
                        edges.to_string(),
                        exact.as_ref().map(|e| cell(e.value)).unwrap_or_default(),
                        exact.as_ref().map(|e| format!("{:?}", e.removed())).unwrap_or_default(),
                        cell(greedy.value),
                        oracle.as_ref().map(|o| cell(o.value)).unwrap_or_default(),
                    ]);
                    rows_json.push(json!({
                        "resolution": r,
                        "instance": inst_idx,
                        "eta": [eta.0.numer(), eta.0.denom()],
                        "scale": [scale_q.numer(), scale_q.denom()],
                        "conflict_edges": edges,
                        "exact": exact.as_ref().map(LusinResult::to_json),
                        "greedy": greedy.to_json(),
                        "oracle": oracle.as_ref().map(LusinResult::to_json),
                    }));
                }
            }
            for a in &grid_values {
                for b in &grid_values {
                    if let ((ea, sa, Some(va)), (eb, sb, Some(vb))) = (a, b) {
                        // a is at most as demanding as b: larger eta, smaller scale
                        if ea >= eb && sa <= sb && *va > vb + VALUE_TOL {
                            failures.push(format!(
                                "r={r} instance={inst_idx}: optimum not monotone between (eta={ea}, scale={sa}) and (eta={eb}, scale={sb})"
                            ));
                        }
                    }
                }
            }
        }
    }
    rep.assertions.push(Assertion::new(
        "feasibility, dominance, oracle agreement and monotonicity",
        failures.is_empty(),
        if failures.is_empty() { format!("{cells} cells checked") } else { failures.join("; ") },
    ));
    rep.body = json!({ "cells": rows_json });
    rep.tables.push(("sweep", table));
    rep.notes.push(SURROGATE_NOTE);
    Ok(())
}

fn run_property_sweep(s: &PropertySweepSpec, seed: u64, rep: &mut Report) -> Result<()> {
    let mut table = Table::new(vec![
        "entry", "n", "normalized", "monotone", "subadditive", "two_alternating", "pair_mode", "core_nonempty",
        "greedy_in_core",
    ]);
    let mut entries = Vec::new();
    let opts = PairCheckOptions {
        exhaustive_cap: crate::axioms::EXHAUSTIVE_PAIR_CAP,
        seed,
        trials: s.trials,
    };
    for e in &s.zoo {
        for &n in &e.sizes {
            let space = super::config::GridSpec {
                resolutions: vec![n],
                interval: [super::config::Q::new(0, 1), super::config::Q::new(1, 1)],
            }
            .space(n)?;
            let cap = e.capacity.build(space)?;
            let d = cap.dense_table()?;
            let ax = check_capacity_axioms(&d);
            let sub = check_subadditive_with(&d, &opts);
            let two = check_two_alternating_with(&d, &opts);
            let core = if n <= CORE_LP_CAP { Some(core_nonempty(&cap)?) } else { None };
            let greedy_in_core = if two.holds {
                let g = greedy_chain_measure(&cap, &(0..n).collect::<Vec<_>>())?;
                Some(core_membership(&cap, &g, MembershipMode::Exhaustive)?.member)
            } else {
                None
            };
            let label = format!("{} n={n}", e.name);
            rep.assertions.push(Assertion::new(
                format!("{label}: normalized and monotone"),
                ax.holds(),
                format!("normalized={} monotone={}", ax.normalized.holds, ax.monotone.holds),
            ));
            let mut expect = |what: &str, got: Option<bool>, want: Option<bool>| {
                if let (Some(want), Some(got)) = (want, got) {
                    rep.assertions.push(Assertion::new(
                        format!("{label}: {what}"),
                        got == want,
                        format!("expected {want}, observed {got}"),
                    ));
                }
            };
            expect("subadditive", Some(sub.holds), e.expect.subadditive);
            expect("two-alternating", Some(two.holds), e.expect.two_alternating);
            expect("core nonempty", core.as_ref().map(|c| c.nonempty), e.expect.core_nonempty);
            if let Some(ok) = greedy_in_core {
                rep.assertions.push(Assertion::new(
                    format!("{label}: greedy chain measure in core"),
                    ok,
                    "identity ordering",
                ));
            }
            table.push(vec![
                e.name.clone(),
                n.to_string(),
                ax.normalized.holds.to_string(),
                ax.monotone.holds.to_string(),
                sub.holds.to_string(),
                two.holds.to_string(),
                match two.mode {
                    crate::axioms::CheckMode::Exhaustive => "exhaustive".into(),
                    crate::axioms::CheckMode::Sampled { trials, .. } => format!("sampled({trials})"),
                },
                core.as_ref().map(|c| c.nonempty.to_string()).unwrap_or_default(),
                greedy_in_core.map(|b| b.to_string()).unwrap_or_default(),
            ]);
            entries.push(json!({
                "entry": e.name,
                "n": n,
                "capacity": cap.kind_tag(),
                "params": cap.params(),
                "axioms": ax,
                "subadditive": sub,
                "two_alternating": two,
                "core": core.as_ref().map(|c| c.to_json()),
                "greedy_in_core": greedy_in_core,
            }));
        }
    }
    rep.body = json!({ "entries": entries });
    rep.tables.push(("properties", table));
    Ok(())
}

fn run_set_equality(s: &SetEqualitySpec, rep: &mut Report) -> Result<()> {
    let rows = set_equality(s)?;
    let mut table = Table::new(vec!["resolution", "depth", "lhs", "rhs", "equal", "discrepancy", "matches_expected"]);
    for r in &rows {
        rep.assertions.push(Assertion::new(
            format!("set equality at resolution {}", r.resolution),
            r.equal,
            format!("discrepancy {:?}", r.discrepancy),
        ));
        if let Some(m) = r.matches_expected {
            rep.assertions.push(Assertion::new(
                format!("both sides match expected set at resolution {}", r.resolution),
                m,
                format!("{:?}", r.lhs),
            ));
        }
        table.push(vec![
            r.resolution.to_string(),
            r.depth.to_string(),
            r.lhs.to_hex(),
            r.rhs.to_hex(),
            r.equal.to_string(),
            r.discrepancy.to_hex(),
            r.matches_expected.map(|b| b.to_string()).unwrap_or_default(),
        ]);
    }
    rep.body = json!({
        "delta": [s.delta.0.numer(), s.delta.0.denom()],
        "rows": rows,
    });
    rep.tables.push(("set_equality", table));
    Ok(())
}
