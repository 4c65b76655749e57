//! Batch front end: experiment configs, artifact writing and cost tables.
//!
//! Exit codes: 0 success, 1 other failure, 2 schema or configuration error,
//! 3 infeasible schedule or start vector, 4 amplification norm bound
//! violated, 5 polynomial bound violated, 6 polynomial degree cap exceeded,
//! 7 I/O error.

pub mod cli;
pub mod config;
pub mod costs;
pub mod error;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, ObjectiveSpec, OutputFormat, Overrides, X0Spec};
pub use error::{exit, CliError};
pub use run::{run_experiment, RunOutcome};
