//! Config-driven experiment runner for the coding models in [`ancr`].
//!
//! Every run is a pure function of its config and seed. Queries are
//! classified in parallel, but results are always merged in query order.

pub mod audit;
pub mod config;
mod error;
pub mod experiment;
pub mod report;
pub mod solve_one;

pub use config::{ExperimentConfig, Overrides};
pub use error::{HarnessError, Result};
pub use experiment::{emit_convergence, run_benchmark, run_lambda_sweep, ConvergenceCurve, Experiment};
pub use report::RunReport;
