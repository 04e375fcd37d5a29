//! Experiment runner for the `fogcell` models.
//!
//! Each subcommand turns an [`ExperimentConfig`] into a deterministic text
//! artifact. Output starts with `#` lines echoing the tool version and the
//! full effective configuration; dropping those lines leaves plain CSV
//! (or `key=value` lines for the calibration fragment).

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

pub use config::{ConfigError, ExperimentConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(#[from] fogcell::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for usage/config/IO problems, 2 for model failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Model(_) => 2,
        }
    }
}
