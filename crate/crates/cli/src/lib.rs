//! Configuration-driven experiments for the `effham` toolkit: landscape
//! scans, accelerated searches, variational trajectories and reference
//! fixtures, each written as deterministic CSV alongside a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::run;
pub use config::{Command, Overrides};
pub use error::CliError;
