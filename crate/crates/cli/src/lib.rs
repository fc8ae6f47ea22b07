//! Batch front end: config loading, presets, runs, sweeps, analysis of
//! saved snapshots and the gyroscope comparison table.

pub mod analyze;
pub mod config;
pub mod image;
pub mod metrology_cmd;
pub mod presets;
pub mod runner;
pub mod sweep;

use config::ConfigError;
use polgyro_core::solver::SolverError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

impl CliError {
    /// 1 for anything wrong with the inputs, 2 when the numerics fail.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BlowUp { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(ConfigError::Invalid { field: "solver".into(), message: other.to_string() }),
        }
    }
}
