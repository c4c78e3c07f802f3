//! Batch front end: configuration parsing, commands and report writing.

pub mod config;
pub mod run;
pub mod selftest;

pub use config::{parse_config, parse_config_str, DataSpec, Overrides, RunConfig};
pub use run::{run_command, Command};

use thiserror::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("checker failure: {0}")]
    Checker(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 config, 3 checker, 4 solver or IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Checker(_) => 3,
            CliError::Solver(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<lie_diffuse::Error> for CliError {
    fn from(e: lie_diffuse::Error) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
