//! Command-line front end: config-driven training runs and cross-run
//! population comparison.

pub mod config;
pub mod domain;
pub mod error;
pub mod rpp;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use rpp::{cmd_rpp, RppOptions};
pub use run::{cmd_run, RunOptions};
