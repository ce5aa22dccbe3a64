//! Command-line driver for `rgstep-core`: configuration files, text and
//! JSON formats, and the `certify`, `iterate`, `lro` and `selfcheck`
//! commands.

pub mod commands;
pub mod config;
pub mod report;
pub mod selfcheck;
pub mod textfmt;

use config::ConfigError;
use textfmt::TextError;

/// How a command ended when it did not error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rgstep_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input, 3 for a failed computation.
    pub fn exit_code(&self) -> u8 {
        use rgstep_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Text(_) | CliError::Usage(_) => 2,
            CliError::Core(E::EnumerationCap { .. } | E::InvalidParameter(_) | E::Domain { .. }) => 2,
            _ => 3,
        }
    }
}
