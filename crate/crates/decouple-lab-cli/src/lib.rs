//! Driver layer for the decoupling lab: configuration parsing, experiment
//! dispatch, and machine-readable report emission. All numerics live in
//! `decouple-lab-core`; this crate owns IO, the CLI, and the file formats.

pub mod config;
pub mod experiments;
pub mod output;
pub mod parallel;

pub use config::{parse_config, Command, ConfigError, ExperimentConfig};
pub use experiments::{run, RunError};
