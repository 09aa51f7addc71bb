//! Command-line front end: run configuration, eigenvalue cache, and report
//! emission for the experiments in `scslab-core`.

pub mod args;
pub mod cache;
pub mod config;
pub mod grid;
pub mod output;
pub mod run;

pub use config::{Command, ConfigError, RunConfig};
pub use run::{run, ReportEnvelope, RunError};
