//! Experiment drivers behind the command-line tool.

pub mod average;
pub mod check;
pub mod compare;
pub mod config;
pub mod hessian;
pub mod rate;
pub mod simulate;
pub mod sweep;

pub use average::{run_average, AverageOutcome};
pub use check::{all_pass, Check};
pub use compare::{run_compare, CompareReport, Comparison, SchemeOutcome};
pub use config::{Config, Scenario};
pub use hessian::{run_hessian_invariance, HessianReport, RateRow};
pub use rate::{estimate_rate, RateEstimate};
pub use simulate::{run_simulate, ResolvedParams, RunSummary, Simulation};
pub use sweep::{run_omega_sweep, OmegaSweepReport, SweepRow};
