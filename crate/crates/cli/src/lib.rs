//! Library half of the `destab` command line: module arguments, verification
//! suites and output formats.

pub mod input;
pub mod output;
pub mod suites;

use thiserror::Error;

use destab::complex::ComplexError;
use destab::oracle::OracleError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
    #[error("computation failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 pass, 1 check failure, 2 usage or parse error, 3 window exhausted.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::WindowExhausted(_) => 3,
            CliError::CheckFailed(_) | CliError::Internal(_) => 1,
        }
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::WindowExhausted { .. } => CliError::WindowExhausted(e.to_string()),
            OracleError::Complex(c) => c.into(),
            e => CliError::Internal(e.to_string()),
        }
    }
}
