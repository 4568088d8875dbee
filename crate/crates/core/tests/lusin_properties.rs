use std::sync::Arc;

use capacity_lab::lusin::{
    brute_force_oracle, conflict_pairs, exact_min_removal, greedy_removal, LusinInstance,
};
use capacity_lab::{Capacity, FiniteMetricSpace, Rational, SubsetMask, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(n: usize) -> Arc<FiniteMetricSpace> {
    Arc::new(FiniteMetricSpace::interval_grid(n, Rational::from_integer(0), Rational::from_integer(1)).unwrap())
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..12)).collect();
    WeightVector::proportional(&w).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Capacity, Vec<f64>) {
    let n = rng.gen_range(4..=12);
    let cap = if rng.gen_bool(0.5) {
        Capacity::huber(grid(n), random_weights(rng, n), Rational::new(1, 10), Rational::new(rng.gen_range(1..5), 20)).unwrap()
    } else {
        Capacity::sup_of_measures(grid(n), vec![random_weights(rng, n), random_weights(rng, n)]).unwrap()
    };
    let u = (0..n).map(|_| f64::from(rng.gen_range(0..=3)) / 3.0).collect();
    (cap, u)
}

#[test]
fn every_solver_returns_a_conflict_free_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let (cap, u) = random_instance(&mut rng);
        let n = cap.len();
        let inst = LusinInstance::new(cap, u, 0.3, Rational::new(2, (n - 1) as i64)).unwrap();
        for r in [exact_min_removal(&inst).unwrap(), greedy_removal(&inst), brute_force_oracle(&inst).unwrap()] {
            assert_eq!(inst.conflicts_within(&r.k), 0);
            assert!((inst.capacity.evaluate(&r.k.complement()) - r.value).abs() == 0.0);
        }
    }
}

#[test]
fn greedy_dominates_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let (cap, u) = random_instance(&mut rng);
        let n = cap.len();
        let inst = LusinInstance::new(cap, u, 0.0, Rational::new(3, (n - 1) as i64)).unwrap();
        let e = exact_min_removal(&inst).unwrap();
        let g = greedy_removal(&inst);
        assert!(g.value >= e.value - 1e-12);
        assert!(e.value >= 0.0);
    }
}

#[test]
fn optimum_is_monotone_in_eta_and_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let (cap, u) = random_instance(&mut rng);
        let n = cap.len() as i64;
        let solve = |eta: f64, steps: i64| {
            let inst = LusinInstance::new(cap.clone(), u.clone(), eta, Rational::new(steps, n - 1)).unwrap();
            exact_min_removal(&inst).unwrap().value
        };
        for steps in 1..=3 {
            let by_eta: Vec<f64> = [0.0, 0.34, 0.67, 1.0].iter().map(|&e| solve(e, steps)).collect();
            assert!(by_eta.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{by_eta:?}");
        }
        for eta in [0.0, 0.34] {
            let by_scale: Vec<f64> = (1..=4).map(|s| solve(eta, s)).collect();
            assert!(by_scale.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{by_scale:?}");
        }
    }
}

#[test]
fn contamination_floor_holds_whenever_there_is_a_conflict() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..60 {
        let n = rng.gen_range(4..=14);
        let eps = Rational::new(rng.gen_range(1..4), 10);
        let cap = Capacity::huber(grid(n), random_weights(&mut rng, n), eps, Rational::new(1, 20)).unwrap();
        let u = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
        let inst = LusinInstance::new(cap, u, 0.5, Rational::new(2, (n - 1) as i64)).unwrap();
        let e = exact_min_removal(&inst).unwrap();
        if !conflict_pairs(&inst).is_empty() {
            assert!(e.value >= *eps.numer() as f64 / *eps.denom() as f64 - 1e-12);
        } else {
            assert_eq!(e.value, 0.0);
        }
    }
}

#[test]
fn positive_case_optimum_is_bounded_by_ball_mass_and_decays() {
    let mut prev = f64::INFINITY;
    for r in [11, 41, 101, 401, 1001] {
        let ms = vec![WeightVector::uniform(r), WeightVector::triangular(r)];
        let cap = Capacity::sup_of_measures(grid(r), ms.clone()).unwrap();
        let scale = cap.space().step().unwrap() * Rational::from_integer(2);
        let u = (0..r).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let inst = LusinInstance::new(cap.clone(), u, 0.5, scale).unwrap();
        let e = exact_min_removal(&inst).unwrap();
        let ball = cap.space().closed_neighborhood(&SubsetMask::singleton(r, 0), scale);
        let bound = ms.iter().map(|m| m.mass(&ball)).fold(0.0, f64::max);
        assert!(e.value <= bound + 1e-12);
        assert!(e.value < prev);
        prev = e.value;
    }
    assert!(prev < 0.002);
}

#[test]
fn oracle_and_exact_agree_on_hundred_seeded_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let (cap, u) = random_instance(&mut rng);
        let n = cap.len() as i64;
        let eta = f64::from(rng.gen_range(0..3)) / 3.0;
        let inst = LusinInstance::new(cap, u, eta, Rational::new(rng.gen_range(1..=3), n - 1)).unwrap();
        let e = exact_min_removal(&inst).unwrap();
        let o = brute_force_oracle(&inst).unwrap();
        assert_eq!(e.value, o.value);
        assert_eq!(e.k, o.k);
    }
}
