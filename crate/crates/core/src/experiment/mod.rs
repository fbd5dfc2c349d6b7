//! Monte Carlo sweeps comparing property frequencies with limit laws.

pub mod config;
pub mod output;
pub mod plan;
pub mod sweep;

pub use config::{ExperimentConfig, Profile, Theorem};
pub use output::emit_outputs;
pub use plan::{plan_point, PlannedPoint};
pub use sweep::{compare_to_limit, run_sweep, wilson_interval, ComparisonRow, SweepResult};
