//! Experiment runner, file formats and acceptance suite built on
//! `fracmaster-core`.

pub mod acceptance;
pub mod config;
pub mod io;
pub mod manifest;
pub mod plotdata;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use runner::{run, RunError, RunOptions, RunOutcome, ToleranceProfile};
