//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use capacity_lab::axioms::{
    check_capacity_axioms, check_subadditive, check_two_alternating, default_shrink_schedule, CheckMode,
};
use capacity_lab::capacity::choquet_integral;
use capacity_lab::core_lp::{core_exactness_gap, core_membership, core_nonempty, greedy_chain_measure, MembershipMode};
use capacity_lab::experiments::chain::{continuity_gap, ChainScenario};
use capacity_lab::experiments::config::{CapacitySpec, ChainSpec, Depth, GridSpec, Harmonic, MeasureSpec, ReportFormat, Q};
use capacity_lab::experiments::{run_scenario, LoadedScenario};
use capacity_lab::lusin::{brute_force_oracle, constructive_simple, exact_min_removal, partition_by_value, LusinInstance};
use capacity_lab::{Capacity, DenseSetFunction, Error, FiniteMetricSpace, Rational, SetDescriptor, SubsetMask, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VALUE_TOL: f64 = 1e-12;
const CORE_TOL: f64 = 1e-9;
const RESOLUTIONS: [usize; 3] = [11, 101, 1001];
const LUSIN_RUNTIME: Duration = Duration::from_secs(10);
const PAIR_RUNTIME: Duration = Duration::from_secs(60);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn grid(n: usize) -> Arc<FiniteMetricSpace> {
    Arc::new(FiniteMetricSpace::interval_grid(n, q(0, 1), q(1, 1)).unwrap())
}

fn indicator(n: usize, at: usize) -> Vec<f64> {
    (0..n).map(|i| if i == at { 1.0 } else { 0.0 }).collect()
}

fn huber(n: usize) -> Capacity {
    Capacity::huber(grid(n), WeightVector::uniform(n), q(1, 10), q(1, 20)).unwrap()
}

fn sup_two(n: usize) -> Capacity {
    Capacity::sup_of_measures(grid(n), vec![WeightVector::uniform(n), WeightVector::triangular(n)]).unwrap()
}

fn indicator_instance(cap: Capacity) -> LusinInstance {
    let n = cap.len();
    let scale = cap.space().step().unwrap() * Rational::from_integer(2);
    LusinInstance::new(cap, indicator(n, 0), 0.5, scale).unwrap()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut values = Vec::new();
    let mut ok = true;
    let mut oracle_match = false;
    for r in RESOLUTIONS {
        let inst = indicator_instance(huber(r));
        let e = exact_min_removal(&inst).unwrap();
        ok &= e.value >= 0.1 - VALUE_TOL;
        if r == 11 {
            let o = brute_force_oracle(&inst).unwrap();
            oracle_match = o.value == e.value && o.k == e.k;
        }
        values.push(format!("{r}: {:.6}", e.value));
    }
    let elapsed = t.elapsed();
    outcome(
        ok && oracle_match && elapsed < LUSIN_RUNTIME,
        format!(
            "huber optimum [{}] >= 0.1, oracle match at 11 = {oracle_match}, {elapsed:.2?}",
            values.join(", ")
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut values = Vec::new();
    let mut below_ball = true;
    for r in RESOLUTIONS {
        let cap = sup_two(r);
        let ball = SubsetMask::from_indices(r, [0, 1, 2]);
        let bound = WeightVector::uniform(r).mass(&ball).max(WeightVector::triangular(r).mass(&ball));
        let e = exact_min_removal(&indicator_instance(cap)).unwrap();
        below_ball &= e.value <= bound + VALUE_TOL;
        values.push(e.value);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let finest = *values.last().unwrap();
    let elapsed = t.elapsed();
    outcome(
        below_ball && decreasing && finest <= 0.01 && elapsed < LUSIN_RUNTIME,
        format!(
            "sup optimum {values:.6?}, below 3-point ball = {below_ball}, strictly decreasing = {decreasing}, finest <= 0.01, {elapsed:.2?}"
        ),
    )
}

fn chain(capacity: CapacitySpec) -> ChainScenario {
    ChainScenario {
        grid: GridSpec {
            resolutions: RESOLUTIONS.to_vec(),
            interval: [Q::new(0, 1), Q::new(1, 1)],
        },
        capacity,
        chain: ChainSpec::Harmonic(Harmonic {
            lo: Q::new(0, 1),
            span: Q::new(1, 1),
            lo_closed: false,
            hi_closed: false,
        }),
        limit: SetDescriptor::Empty,
        depth: Depth::Resolution,
    }
}

fn criterion_3() -> Outcome {
    let m = continuity_gap(&chain(CapacitySpec::Measure { mu: MeasureSpec::Uniform })).unwrap();
    let h = continuity_gap(&chain(CapacitySpec::Huber {
        mu: MeasureSpec::Uniform,
        eps: Q::new(1, 10),
        delta: Q::new(1, 20),
    }))
    .unwrap();
    let measure_inf = m.finest().inf_gap_before_collapse.unwrap();
    let huber_min = h.min_gap_nonempty().unwrap();
    let nonempty = h.rows.iter().filter(|r| r.nonempty).count();
    let nonneg = m.rows.iter().chain(&h.rows).all(|r| r.gap >= -VALUE_TOL);
    outcome(
        measure_inf <= 2.0 / 1001.0 && huber_min >= 0.1 - VALUE_TOL && nonneg,
        format!(
            "measure gap inf before collapse at 1001 = {measure_inf:.6e} <= {:.6e}; huber min gap over {nonempty} nonempty (resolution, k) = {huber_min:.6}",
            2.0 / 1001.0
        ),
    )
}

fn zoo(n: usize) -> Vec<(String, Capacity)> {
    let g = grid(n);
    let mut out = vec![
        ("uniform".to_string(), Capacity::measure(g.clone(), WeightVector::uniform(n)).unwrap()),
        ("triangular".to_string(), Capacity::measure(g.clone(), WeightVector::triangular(n)).unwrap()),
        ("sup".to_string(), sup_two(n)),
    ];
    for (a, b) in [(1, 20), (1, 10), (1, 5)] {
        out.push((
            format!("huber-{a}/{b}"),
            Capacity::huber(g.clone(), WeightVector::uniform(n), q(1, 10), q(a, b)).unwrap(),
        ));
    }
    out
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    for n in 2..=12 {
        for (name, cap) in zoo(n) {
            let ax = check_capacity_axioms(&cap.dense_table().unwrap());
            if !ax.holds() || ax.monotone.mode != CheckMode::Exhaustive {
                failures.push(format!("{name} n={n} axioms"));
            }
        }
    }
    let t = Instant::now();
    let mut pairs = 0u64;
    for n in 2..=10 {
        for (name, cap) in zoo(n).into_iter().filter(|(name, _)| name.starts_with("huber")) {
            let d = cap.dense_table().unwrap();
            for r in [check_subadditive(&d), check_two_alternating(&d)] {
                pairs += r.checked;
                if !r.holds || r.mode != CheckMode::Exhaustive {
                    failures.push(format!("{name} n={n} {:?}", r.property));
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let pinned = Capacity::sup_of_measures(
        grid(4),
        vec![
            WeightVector::proportional(&[1, 1, 0, 0]).unwrap(),
            WeightVector::proportional(&[0, 0, 1, 1]).unwrap(),
        ],
    )
    .unwrap()
    .dense_table()
    .unwrap();
    let r = check_two_alternating(&pinned);
    let witness_ok = match &r.witness {
        Some(w) => {
            let (a, b) = (w.masks[0].bits().unwrap(), w.masks[1].bits().unwrap());
            let recomputed = pinned.get(a | b) + pinned.get(a & b) - pinned.get(a) - pinned.get(b);
            !r.holds && (w.excess - 0.5).abs() < VALUE_TOL && (recomputed - 0.5).abs() < VALUE_TOL
        }
        None => false,
    };
    outcome(
        failures.is_empty() && witness_ok && elapsed < PAIR_RUNTIME,
        format!(
            "zoo axioms n<=12, huber pair checks n<=10 ({pairs} pairs, {elapsed:.2?}), pinned sup witness = {witness_ok}; failures {failures:?}"
        ),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..20)).collect();
    WeightVector::proportional(&w).unwrap()
}

fn random_huber(rng: &mut ChaCha8Rng, n: usize) -> Capacity {
    let eps = q(rng.gen_range(0..=5), 10);
    let delta = q(rng.gen_range(1..=8), 20);
    Capacity::huber(grid(n), random_weights(rng, n), eps, delta).unwrap()
}

fn criterion_5() -> Outcome {
    let mut orderings = 0usize;
    let mut failures = Vec::new();
    for n in 2..=7 {
        for (name, cap) in zoo(n) {
            if !check_two_alternating(&cap.dense_table().unwrap()).holds {
                continue;
            }
            for p in permutations(n) {
                let g = greedy_chain_measure(&cap, &p).unwrap();
                orderings += 1;
                if !core_membership(&cap, &g, MembershipMode::Exhaustive).unwrap().member {
                    failures.push(format!("{name} n={n} {p:?}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let cap = random_huber(&mut rng, n);
        let a = SubsetMask::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        worst = worst.max(core_exactness_gap(&cap, &a).unwrap().abs());
    }
    let empty = Capacity::dense(grid(2), DenseSetFunction::new(2, vec![0.0, 0.2, 0.2, 1.0]).unwrap()).unwrap();
    let empty_ok = !core_nonempty(&empty).unwrap().nonempty;
    outcome(
        failures.is_empty() && worst <= CORE_TOL && empty_ok,
        format!(
            "{orderings} greedy orderings in core, max |exactness gap| over 100 pairs = {worst:.3e}, [0, .2, .2, 1] empty = {empty_ok}; failures {failures:?}"
        ),
    )
}

fn random_capacity(rng: &mut ChaCha8Rng, n: usize) -> Capacity {
    match rng.gen_range(0..4) {
        0 => Capacity::measure(grid(n), random_weights(rng, n)).unwrap(),
        1 => {
            let m = rng.gen_range(1..=3);
            Capacity::sup_of_measures(grid(n), (0..m).map(|_| random_weights(rng, n)).collect()).unwrap()
        }
        2 => random_huber(rng, n),
        _ => Capacity::huber(grid(n), WeightVector::uniform(n), q(1, 10), q(rng.gen_range(1..=6), 20)).unwrap(),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = Vec::new();
    let mut positive = 0;
    let instances = 120;
    for i in 0..instances {
        let n = rng.gen_range(4..=15);
        let cap = random_capacity(&mut rng, n);
        let levels = rng.gen_range(1..=4);
        let u: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..=levels)) / f64::from(levels)).collect();
        let eta = f64::from(rng.gen_range(0..levels)) / f64::from(levels);
        let scale = q(rng.gen_range(1..=4), (n - 1) as i64);
        let inst = LusinInstance::new(cap, u, eta, scale).unwrap();
        let e = exact_min_removal(&inst).unwrap();
        let o = brute_force_oracle(&inst).unwrap();
        if e.value > 0.0 {
            positive += 1;
        }
        if e.value != o.value || e.k != o.k {
            mismatches.push(i);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{instances} instances (n <= 15, {positive} with positive optimum), value and mask mismatches {mismatches:?}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut roundtrip: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        let t: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d = DenseSetFunction::new(n, t).unwrap();
        roundtrip = roundtrip.max(d.mobius().zeta().max_abs_diff(&d));
    }
    let mut additive: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=12);
        let w = random_weights(&mut rng, n);
        let cap = Capacity::measure(grid(n), w.clone()).unwrap();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let direct: f64 = u.iter().zip(w.weights()).map(|(a, b)| a * b).sum();
        additive = additive.max((choquet_integral(&cap, &u) - direct).abs());
    }
    let mut comonotone: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let cap = random_capacity(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        // u and w are both nondecreasing along `order`
        let mut u = vec![0.0; n];
        let mut w = vec![0.0; n];
        let (mut a, mut b): (f64, f64) = (rng.gen_range(-1.0..0.0), rng.gen_range(-1.0..0.0));
        for &i in &order {
            a += rng.gen_range(0.0..1.0);
            b += rng.gen_range(0.0..1.0);
            u[i] = a;
            w[i] = b;
        }
        let sum: Vec<f64> = u.iter().zip(&w).map(|(x, y)| x + y).collect();
        let lhs = choquet_integral(&cap, &sum);
        let rhs = choquet_integral(&cap, &u) + choquet_integral(&cap, &w);
        comonotone = comonotone.max((lhs - rhs).abs());
    }
    outcome(
        roundtrip <= VALUE_TOL && additive <= VALUE_TOL && comonotone <= VALUE_TOL,
        format!(
            "mobius-zeta max error {roundtrip:.3e}, additive choquet error {additive:.3e}, comonotonic additivity error {comonotone:.3e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let g = grid(101);
    let schedule = default_shrink_schedule(&g);
    let measure = Capacity::measure(g.clone(), WeightVector::uniform(101)).unwrap();
    let u: Vec<f64> = (0..101).map(|i| if i >= 50 { 1.0 } else { 0.0 }).collect();
    let inst = LusinInstance::new(measure, u, 0.5, q(1, 100)).unwrap();
    let measure_part = match constructive_simple(&inst, &partition_by_value(&inst.u), 0.1, &schedule) {
        Ok(rep) if rep.result.value <= 0.1 => (true, format!("succeeded with v(X\\K) = {:.6}", rep.result.value)),
        Ok(rep) => (false, format!("value {:.6} above budget", rep.result.value)),
        Err(e) => (false, e.to_string()),
    };
    let inst = LusinInstance::new(huber(101), indicator(101, 0), 0.5, q(1, 50)).unwrap();
    let huber_part = match constructive_simple(&inst, &partition_by_value(&inst.u), 0.05, &schedule) {
        Err(Error::ConstructionInfeasible { mask, .. }) if mask == "{0}" => (true, "infeasible at cell {0}".to_string()),
        Err(e) => (false, format!("unexpected error {e}")),
        Ok(_) => (false, "unexpectedly succeeded".to_string()),
    };
    outcome(
        measure_part.0 && huber_part.0,
        format!("measure on G101: {}; huber with budget 0.05: {}", measure_part.1, huber_part.1),
    )
}

fn scenario_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    files
}

fn run_suite(out: &Path) -> Vec<(String, Vec<u8>)> {
    for f in scenario_files() {
        let sc = LoadedScenario::load(&f).unwrap();
        let rep = run_scenario(&sc).unwrap();
        rep.write(out, ReportFormat::Json).unwrap();
        rep.write(out, ReportFormat::Csv).unwrap();
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_suite(a.path());
    let second = run_suite(b.path());
    let scenarios = scenario_files().len();
    outcome(
        !first.is_empty() && first == second,
        format!("{scenarios} scenarios, {} report files byte-identical across two runs", first.len()),
    )
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("counterexample reproduction", criterion_1),
        ("positive case", criterion_2),
        ("continuity dichotomy", criterion_3),
        ("axiom suite", criterion_4),
        ("core suite", criterion_5),
        ("oracle equivalence", criterion_6),
        ("transforms and integral", criterion_7),
        ("regularity probe", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.ok {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
