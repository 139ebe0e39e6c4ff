// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("acceptance threshold failed: {0}")]
    Threshold(String),

    #[error("digest mismatch: {0}")]
    Integrity(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Parse(_) => 2,
            Self::Validation(_) => 3,
            Self::Numerical(_) => 4,
            Self::Threshold(_) => 5,
            Self::Integrity(_) => 6,
        }
    }
}

impl From<mkdv_core::Error> for CliError {
    fn from(e: mkdv_core::Error) -> Self {
        use mkdv_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::GridSize(_) | E::HypothesisViolated(_) | E::MismatchedDimensions => {
                Self::Validation(e.to_string())
            }
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
