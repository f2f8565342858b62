//! Scenario-driven front end: configuration parsing, the solve, verify,
//! spinor and residual pipelines, and CSV/report output.

pub mod config;
pub mod error;
pub mod pipelines;
pub mod tables;

pub use config::{Case, Mode, RawConfig, ScenarioConfig};
pub use error::CliError;
pub use pipelines::{run_residual, run_solve, run_spinor, run_verify, Outcome, Status, System};
