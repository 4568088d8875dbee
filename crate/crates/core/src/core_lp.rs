//! The core of a capacity: probability vectors dominated setwise by `v`.
//!
//! Feasibility over the `2^n` constraints is decided by a small dense simplex
//! on the dual problem, which has only `n + 1` rows:
//!
//! ```text
//! min t  s.t.  ν(A) - t <= v(A) for all A ≠ ∅,  Σν = 1,  ν >= 0
//! ```
//!
//! The core is nonempty iff the optimum `t*` is at most [`CORE_TOL`]; the
//! primal `ν` is read off the dual prices of the final tableau.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::axioms::check_two_alternating;
use crate::capacity::{Capacity, DenseSetFunction, WeightVector};
use crate::finite_space::SubsetMask;
use crate::numeric::sig15_string;
use crate::{Error, Result, CORE_TOL};

/// Size cap for the exact feasibility decision.
pub const CORE_LP_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMode {
    /// All `2^n` sets; requires `n <= 20`.
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub violating: Option<SubsetMask>,
    /// `ν(A) - v(A)` at the reported violation.
    pub excess: f64,
    pub checked: u64,
}

/// Checks `ν(A) <= v(A)` (within [`CORE_TOL`]) over all or sampled sets.
pub fn core_membership(cap: &Capacity, nu: &WeightVector, mode: MembershipMode) -> Result<Membership> {
    let n = cap.len();
    if nu.len() != n {
        return Err(Error::invalid("measure and capacity live on different spaces"));
    }
    let w = nu.weights();
    let check = |mask: &SubsetMask, nu_a: f64| {
        let excess = nu_a - cap.evaluate(mask);
        (excess > CORE_TOL).then_some(excess)
    };
    match mode {
        MembershipMode::Exhaustive => {
            let d = cap.dense_table()?;
            let mut nu_mass = vec![0.0; 1 << n];
            for s in 1..(1usize << n) {
                let low = s.trailing_zeros() as usize;
                nu_mass[s] = nu_mass[s & (s - 1)] + w[low];
                let excess = nu_mass[s] - d.get(s as u64);
                if excess > CORE_TOL {
                    return Ok(Membership {
                        member: false,
                        violating: Some(SubsetMask::from_bits(n, s as u64)),
                        excess,
                        checked: s as u64,
                    });
                }
            }
            Ok(Membership {
                member: true,
                violating: None,
                excess: 0.0,
                checked: (1u64 << n) - 1,
            })
        }
        MembershipMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..trials {
                let mask = SubsetMask::from_indices(n, (0..n).filter(|_| rng.gen::<bool>()));
                if let Some(excess) = check(&mask, nu.mass(&mask)) {
                    return Ok(Membership {
                        member: false,
                        violating: Some(mask),
                        excess,
                        checked: t + 1,
                    });
                }
            }
            Ok(Membership {
                member: true,
                violating: None,
                excess: 0.0,
                checked: trials,
            })
        }
    }
}

/// `ν(x_σ(k)) = v({x_σ(1..=k)}) - v({x_σ(1..k)})`.
pub fn greedy_chain_measure(cap: &Capacity, ordering: &[usize]) -> Result<WeightVector> {
    let n = cap.len();
    let mut seen = vec![false; n];
    if ordering.len() != n || ordering.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::invalid("ordering is not a permutation of the points"));
    }
    let mut w = vec![0.0; n];
    let mut prefix = SubsetMask::empty(n);
    let mut prev = 0.0;
    for &i in ordering {
        prefix.insert(i);
        let cur = cap.evaluate(&prefix);
        w[i] = cur - prev;
        prev = cur;
    }
    clean_weights(w)
}

/// Average of the greedy chain measures over all orderings, computed by the
/// subset formula. Relabelling the points relabels the result.
pub fn shapley_value(cap: &Capacity) -> Result<WeightVector> {
    let d = cap.dense_table()?;
    let n = d.n();
    // coef[s] = s! (n - s - 1)! / n! = 1 / (n * C(n - 1, s))
    let mut coef = vec![0.0; n];
    let mut binom = 1.0;
    for (s, c) in coef.iter_mut().enumerate() {
        *c = 1.0 / (n as f64 * binom);
        binom = binom * (n - 1 - s) as f64 / (s + 1) as f64;
    }
    let mut w = vec![0.0; n];
    for s in 0..(1u64 << n) {
        let size = s.count_ones() as usize;
        for (i, wi) in w.iter_mut().enumerate() {
            if s >> i & 1 == 0 {
                *wi += coef[size] * (d.get(s | 1 << i) - d.get(s));
            }
        }
    }
    clean_weights(w)
}

/// Clears rounding noise (tiny negatives, sum off by ulps) from increments.
fn clean_weights(mut w: Vec<f64>) -> Result<WeightVector> {
    for (i, x) in w.iter_mut().enumerate() {
        if *x < -CORE_TOL {
            return Err(Error::invalid(format!(
                "negative increment {x} at point {i}: capacity is not monotone"
            )));
        }
        *x = x.max(0.0);
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > CORE_TOL || s <= 0.0 {
        return Err(Error::invalid(format!("increments sum to {s}, expected 1")));
    }
    WeightVector::from_f64(w.into_iter().map(|x| x / s).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreMethod {
    /// 2-alternating capacity; the witness averages greedy chain measures.
    Greedy,
    DualSimplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreQueryResult {
    pub nonempty: bool,
    pub witness: Option<WeightVector>,
    pub binding: Vec<SubsetMask>,
    pub method: CoreMethod,
    /// Optimal `t*` of the feasibility LP (0 on the greedy path).
    pub min_violation: f64,
}

impl CoreQueryResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nonempty": self.nonempty,
            "witness": self.witness.as_ref().map(|w| w.weights().iter().map(|x| sig15_string(*x)).collect::<Vec<_>>()),
            "binding": self.binding,
            "method": self.method,
            "min_violation": sig15_string(self.min_violation),
        })
    }
}

/// Decides whether the core is nonempty (`n <= 12`).
pub fn core_nonempty(cap: &Capacity) -> Result<CoreQueryResult> {
    let n = cap.len();
    if n > CORE_LP_CAP {
        return Err(Error::SizeCap {
            what: "core feasibility",
            size: n,
            cap: CORE_LP_CAP,
        });
    }
    let d = cap.dense_table()?;
    if check_two_alternating(&d).holds {
        let witness = shapley_value(cap)?;
        let binding = binding_sets(&d, &witness);
        return Ok(CoreQueryResult {
            nonempty: true,
            witness: Some(witness),
            binding,
            method: CoreMethod::Greedy,
            min_violation: 0.0,
        });
    }
    let (t, nu) = min_violation_lp(&d);
    let witness = if t <= CORE_TOL {
        let w = clean_weights(nu)?;
        let ok = core_membership(cap, &w, MembershipMode::Exhaustive)?;
        if !ok.member {
            return Err(Error::invalid(format!(
                "simplex witness violates the core by {} at {:?}",
                ok.excess, ok.violating
            )));
        }
        Some(w)
    } else {
        None
    };
    let binding = witness.as_ref().map(|w| binding_sets(&d, w)).unwrap_or_default();
    Ok(CoreQueryResult {
        nonempty: witness.is_some(),
        witness,
        binding,
        method: CoreMethod::DualSimplex,
        min_violation: t,
    })
}

fn binding_sets(d: &DenseSetFunction, nu: &WeightVector) -> Vec<SubsetMask> {
    let n = d.n();
    let w = nu.weights();
    let mut mass = vec![0.0; 1 << n];
    let mut out = Vec::new();
    for s in 1..(1usize << n) {
        mass[s] = mass[s & (s - 1)] + w[s.trailing_zeros() as usize];
        if mass[s] >= d.get(s as u64) - CORE_TOL {
            out.push(SubsetMask::from_bits(n, s as u64));
        }
    }
    out
}

/// Solves the dual
///
/// ```text
/// max z - Σ_A v(A) y_A  s.t.  Σ_A y_A = 1,  z - Σ_{A ∋ i} y_A <= 0,  y >= 0
/// ```
///
/// with Bland's rule and returns `(t*, ν)` where `ν_i` is the price of row `i`.
fn min_violation_lp(d: &DenseSetFunction) -> (f64, Vec<f64>) {
    const PIVOT_TOL: f64 = 1e-12;
    let n = d.n();
    let full = d.full_mask() as usize;
    let ny = full; // y_A for A = 1..=full at column A - 1
    let zp = ny;
    let zm = ny + 1;
    let s0 = ny + 2;
    let cols = s0 + n;
    let rows = n + 1;

    let mut cost = vec![0.0; cols];
    for a in 1..=full {
        cost[a - 1] = -d.get(a as u64);
    }
    cost[zp] = 1.0;
    cost[zm] = -1.0;

    // Tableau already reduced for the starting basis {y_X, s_1..s_n}.
    let mut t = vec![vec![0.0; cols + 1]; rows];
    for a in 1..=full {
        t[0][a - 1] = 1.0;
    }
    t[0][cols] = 1.0;
    for i in 0..n {
        let r = &mut t[i + 1];
        for a in 1..=full {
            r[a - 1] = if a >> i & 1 == 1 { 0.0 } else { 1.0 };
        }
        r[zp] = 1.0;
        r[zm] = -1.0;
        r[s0 + i] = 1.0;
        r[cols] = 1.0;
    }
    let mut basis: Vec<usize> = std::iter::once(full - 1).chain((0..n).map(|i| s0 + i)).collect();

    let reduced = |t: &Vec<Vec<f64>>, basis: &[usize], j: usize| -> f64 {
        (0..rows).map(|r| cost[basis[r]] * t[r][j]).sum::<f64>() - cost[j]
    };

    for _ in 0..100_000 {
        let entering = (0..cols).find(|&j| !basis.contains(&j) && reduced(&t, &basis, j) < -PIVOT_TOL);
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            if t[r][j] > PIVOT_TOL {
                let ratio = t[r][cols] / t[r][j];
                let better = match leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - PIVOT_TOL
                            || (ratio <= lratio + PIVOT_TOL && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // The dual is bounded (z <= 1), so this is numerical breakdown.
            break;
        };
        let p = t[pr][j];
        for x in t[pr].iter_mut() {
            *x /= p;
        }
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr {
                let f = row[j];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        basis[pr] = j;
    }

    let objective: f64 = (0..rows).map(|r| cost[basis[r]] * t[r][cols]).sum();
    let nu = (0..n).map(|i| reduced(&t, &basis, s0 + i)).collect();
    (objective, nu)
}

/// `v(A) - ν_A(A)` for the greedy chain measure listing `A` first.
pub fn core_exactness_gap(cap: &Capacity, a: &SubsetMask) -> Result<f64> {
    if cap.len() > crate::capacity::DENSE_CAP {
        return Err(Error::SizeCap {
            what: "core exactness gap",
            size: cap.len(),
            cap: crate::capacity::DENSE_CAP,
        });
    }
    let nu = greedy_chain_measure(cap, &ordering_with_first(a))?;
    Ok(cap.evaluate(a) - nu.mass(a))
}

/// Points of `a` in increasing order, then the rest in increasing order.
pub fn ordering_with_first(a: &SubsetMask) -> Vec<usize> {
    a.iter().chain(a.complement().iter()).collect()
}
