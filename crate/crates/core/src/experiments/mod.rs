//! Scenario-driven experiments: configuration, chain probes, runners and
//! report emission.

pub mod chain;
pub mod config;
pub mod report;
pub mod runs;

pub use chain::{continuity_gap, realize_chain, set_equality, ChainScenario, GapReport, GapRow, ResolutionSummary};
pub use config::{LoadedScenario, ReportFormat, RunSpec, ScenarioConfig, Q, SCHEMA_VERSION};
pub use report::{Assertion, Report, Table};
pub use runs::run_scenario;

/// Process exit status for a finished run.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
