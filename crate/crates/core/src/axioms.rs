//! Property checkers for set functions and the regularity probe.
//!
//! Pair properties (sub-additivity, 2-alternation) are checked over all `4^n`
//! ordered mask pairs up to [`EXHAUSTIVE_PAIR_CAP`] points and by seeded
//! uniform sampling beyond. Failing reports carry a witness that has been
//! shrunk by greedy bit removal.
//!
//! Continuity from below, and continuity from above along closed sets, are
//! vacuous on a finite ground set because every monotone sequence of subsets
//! stabilises; they are probed through chain scenarios in
//! [`crate::experiments`], never here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::capacity::{Capacity, DenseSetFunction};
use crate::finite_space::{FiniteMetricSpace, Rational, SubsetMask};
use crate::{Error, Result, VALUE_TOL};

pub const EXHAUSTIVE_PAIR_CAP: usize = 10;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Monotonicity is checked over all comparable pairs up to this size and over
/// covering pairs (`A \ {i} ⊂ A`) beyond.
pub const SUBMASK_ENUMERATION_CAP: usize = 12;

pub const CONTINUITY_NOTE: &str =
    "continuity from below is vacuous on a finite ground set; see chain-probe scenarios";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Normalized,
    Monotone,
    Subadditive,
    TwoAlternating,
    RegularAt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub masks: Vec<SubsetMask>,
    pub values: Vec<f64>,
    /// Amount by which the inequality is violated.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub checked: u64,
    #[serde(flatten)]
    pub mode: CheckMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub normalized: PropertyReport,
    pub monotone: PropertyReport,
    pub continuity: &'static str,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.normalized.holds && self.monotone.holds
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PairCheckOptions {
    pub exhaustive_cap: usize,
    pub seed: u64,
    pub trials: u64,
}

impl Default for PairCheckOptions {
    fn default() -> Self {
        PairCheckOptions {
            exhaustive_cap: EXHAUSTIVE_PAIR_CAP,
            seed: 0,
            trials: DEFAULT_TRIALS,
        }
    }
}

fn mask(d: &DenseSetFunction, bits: u64) -> SubsetMask {
    SubsetMask::from_bits(d.n(), bits)
}

/// Normalisation (`v(∅) = 0`, `v(X) = 1`) and monotonicity.
pub fn check_capacity_axioms(d: &DenseSetFunction) -> AxiomReport {
    let full = d.full_mask();
    let bottom = d.get(0);
    let top = d.get(full);
    let normalized = if bottom.abs() > VALUE_TOL {
        failed(Property::Normalized, 2, vec![mask(d, 0)], vec![bottom], bottom.abs())
    } else if (top - 1.0).abs() > VALUE_TOL {
        failed(Property::Normalized, 2, vec![mask(d, full)], vec![top], (top - 1.0).abs())
    } else {
        passed(Property::Normalized, 2, CheckMode::Exhaustive)
    };

    let mut checked = 0u64;
    let mut violation = None;
    'outer: for b in 0..=full {
        let vb = d.get(b);
        if d.n() <= SUBMASK_ENUMERATION_CAP {
            // every proper submask of b
            let mut a = b;
            while a != 0 {
                a = (a - 1) & b;
                checked += 1;
                if d.get(a) > vb + VALUE_TOL {
                    violation = Some((a, b));
                    break 'outer;
                }
            }
        } else {
            let mut rest = b;
            while rest != 0 {
                let a = b & !(rest & rest.wrapping_neg());
                rest &= rest - 1;
                checked += 1;
                if d.get(a) > vb + VALUE_TOL {
                    violation = Some((a, b));
                    break 'outer;
                }
            }
        }
    }
    let monotone = match violation {
        Some((a, b)) => failed(
            Property::Monotone,
            checked,
            vec![mask(d, a), mask(d, b)],
            vec![d.get(a), d.get(b)],
            d.get(a) - d.get(b),
        ),
        None => passed(Property::Monotone, checked, CheckMode::Exhaustive),
    };
    AxiomReport {
        normalized,
        monotone,
        continuity: CONTINUITY_NOTE,
    }
}

/// `v(A ∪ B) <= v(A) + v(B)`.
pub fn check_subadditive(d: &DenseSetFunction) -> PropertyReport {
    check_subadditive_with(d, &PairCheckOptions::default())
}

pub fn check_subadditive_with(d: &DenseSetFunction, opts: &PairCheckOptions) -> PropertyReport {
    check_pairs(d, opts, Property::Subadditive, |d, a, b| {
        d.get(a | b) - d.get(a) - d.get(b)
    })
}

/// `v(A ∪ B) + v(A ∩ B) <= v(A) + v(B)`.
pub fn check_two_alternating(d: &DenseSetFunction) -> PropertyReport {
    check_two_alternating_with(d, &PairCheckOptions::default())
}

pub fn check_two_alternating_with(d: &DenseSetFunction, opts: &PairCheckOptions) -> PropertyReport {
    check_pairs(d, opts, Property::TwoAlternating, |d, a, b| {
        d.get(a | b) + d.get(a & b) - d.get(a) - d.get(b)
    })
}

fn check_pairs(
    d: &DenseSetFunction,
    opts: &PairCheckOptions,
    property: Property,
    excess: impl Fn(&DenseSetFunction, u64, u64) -> f64,
) -> PropertyReport {
    let full = d.full_mask();
    let (found, checked, mode) = if d.n() <= opts.exhaustive_cap {
        let mut found = None;
        let mut checked = 0u64;
        'outer: for a in 0..=full {
            for b in 0..=full {
                checked += 1;
                if excess(d, a, b) > VALUE_TOL {
                    found = Some((a, b));
                    break 'outer;
                }
            }
        }
        (found, checked, CheckMode::Exhaustive)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut found = None;
        let mut checked = 0u64;
        for _ in 0..opts.trials {
            let a = rng.gen::<u64>() & full;
            let b = rng.gen::<u64>() & full;
            checked += 1;
            if excess(d, a, b) > VALUE_TOL {
                found = Some((a, b));
                break;
            }
        }
        let mode = CheckMode::Sampled {
            seed: opts.seed,
            trials: opts.trials,
        };
        (found, checked, mode)
    };
    match found {
        None => passed(property, checked, mode),
        Some((a, b)) => {
            let (a, b) = minimize_pair(d, a, b, &excess);
            let values = match property {
                Property::Subadditive => vec![d.get(a | b), d.get(a), d.get(b)],
                _ => vec![d.get(a | b), d.get(a & b), d.get(a), d.get(b)],
            };
            PropertyReport {
                property,
                holds: false,
                witness: Some(Witness {
                    masks: vec![mask(d, a), mask(d, b)],
                    values,
                    excess: excess(d, a, b),
                }),
                checked,
                mode,
                note: None,
            }
        }
    }
}

/// Drops bits from `a` and `b` one at a time while the violation persists.
fn minimize_pair(
    d: &DenseSetFunction,
    mut a: u64,
    mut b: u64,
    excess: &impl Fn(&DenseSetFunction, u64, u64) -> f64,
) -> (u64, u64) {
    loop {
        let mut changed = false;
        for i in 0..d.n() {
            let bit = 1u64 << i;
            if a & bit != 0 && excess(d, a & !bit, b) > VALUE_TOL {
                a &= !bit;
                changed = true;
            }
            if b & bit != 0 && excess(d, a, b & !bit) > VALUE_TOL {
                b &= !bit;
                changed = true;
            }
        }
        if !changed {
            return (a, b);
        }
    }
}

fn passed(property: Property, checked: u64, mode: CheckMode) -> PropertyReport {
    PropertyReport {
        property,
        holds: true,
        witness: None,
        checked,
        mode,
        note: None,
    }
}

fn failed(
    property: Property,
    checked: u64,
    masks: Vec<SubsetMask>,
    values: Vec<f64>,
    excess: f64,
) -> PropertyReport {
    PropertyReport {
        property,
        holds: false,
        witness: Some(Witness {
            masks,
            values,
            excess,
        }),
        checked,
        mode: CheckMode::Exhaustive,
        note: None,
    }
}

/// Outcome of sandwiching a set between a closed inner and an open outer
/// δ-neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityProbe {
    pub inner: SubsetMask,
    pub outer: SubsetMask,
    /// `v(outer \ inner)`.
    pub value: f64,
    pub delta: Rational,
    pub achieved: bool,
}

impl RegularityProbe {
    pub fn to_report(&self, eps: f64) -> PropertyReport {
        PropertyReport {
            property: Property::RegularAt,
            holds: self.achieved,
            witness: (!self.achieved).then(|| Witness {
                masks: vec![self.inner.clone(), self.outer.clone()],
                values: vec![self.value],
                excess: self.value - eps,
            }),
            checked: 1,
            mode: CheckMode::Exhaustive,
            note: Some(format!(
                "single (A, eps) certificate at delta = {}; not a whole-space regularity claim",
                self.delta
            )),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "inner": self.inner,
            "outer": self.outer,
            "value": crate::numeric::round_sig15(self.value),
            "delta": [self.delta.numer(), self.delta.denom()],
            "achieved": self.achieved,
        })
    }
}

/// Scans a decreasing δ schedule with `F = delta_shrink(A, δ)` and
/// `O = open_neighborhood(A, δ)`, returning the first pair with
/// `v(O \ F) <= eps`, or the best pair seen with `achieved = false`.
pub fn regularity_probe(
    space: &FiniteMetricSpace,
    capacity: &Capacity,
    a: &SubsetMask,
    eps: f64,
    schedule: &[Rational],
) -> Result<RegularityProbe> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid(format!("regularity probe needs eps > 0, got {eps}")));
    }
    if schedule.is_empty() {
        return Err(Error::invalid("shrink schedule is empty"));
    }
    if schedule.iter().any(|d| *d <= Rational::from_integer(0)) {
        return Err(Error::invalid("shrink schedule entries must be positive"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("shrink schedule must be strictly decreasing"));
    }
    let mut best: Option<RegularityProbe> = None;
    for &delta in schedule {
        let inner = space.delta_shrink(a, delta);
        let outer = space.open_neighborhood(a, delta);
        let value = capacity.evaluate(&outer.difference(&inner));
        let probe = RegularityProbe {
            inner,
            outer,
            value,
            delta,
            achieved: value <= eps,
        };
        if probe.achieved {
            return Ok(probe);
        }
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(probe);
        }
    }
    Ok(best.expect("schedule is nonempty"))
}

/// Dyadic schedule `diam / 2^j`, stopping at the smallest positive distance,
/// which is always the final entry.
///
/// Neighbourhoods with δ below the point spacing collapse to `F = A = O` on
/// the trace, which makes every set function regular; the floor keeps the
/// sandwich meaningful.
pub fn default_shrink_schedule(space: &FiniteMetricSpace) -> Vec<Rational> {
    let floor = match space.min_positive_distance() {
        Some(h) => h,
        None => return vec![Rational::from_integer(1)],
    };
    let mut out = Vec::new();
    let mut delta = space.diameter() / Rational::from_integer(2);
    while delta > floor {
        out.push(delta);
        delta /= Rational::from_integer(2);
    }
    out.push(floor);
    out
}
