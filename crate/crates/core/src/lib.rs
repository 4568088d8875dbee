//! Non-additive measures (capacities) on finite metric spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`finite_space`]: exact-rational finite metric spaces, subset masks and the
//!   open/closed δ-neighbourhood operators.
//! - [`capacity`]: the capacity zoo (measures, suprema of measures, ε-δ
//!   contamination), dense tables, Möbius/zeta transforms and the Choquet integral.
//! - [`axioms`]: exhaustive and sampled property checkers and the regularity probe.
//! - [`core_lp`]: the core polytope (membership, greedy chain measures, feasibility).
//! - [`lusin`]: Lusin-set optimisation on a grid (branch-and-bound, greedy,
//!   constructive, brute force).
//! - [`experiments`]: scenario configuration, chain probes and report emission.

pub mod axioms;
pub mod capacity;
pub mod core_lp;
mod error;
pub mod experiments;
pub mod finite_space;
pub mod lusin;
pub mod numeric;

pub use error::{Error, Result};
pub use capacity::{Capacity, CapacityKind, DenseSetFunction, WeightVector};
pub use finite_space::{FiniteMetricSpace, Interval, Rational, SetDescriptor, SubsetMask};

/// Absolute tolerance used for every equality assertion on capacity values.
pub const VALUE_TOL: f64 = 1e-12;

/// Tolerance for core constraints, looser because greedy increments accumulate
/// one subtraction per point.
pub const CORE_TOL: f64 = 1e-9;
