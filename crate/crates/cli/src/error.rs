use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("invalid argument `{arg}`: {message}")]
    Argument { arg: &'static str, message: String },
    #[error(transparent)]
    Core(#[from] g2flow::Error),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
    #[error("early stop: {0}")]
    EarlyStop(String),
    #[error("selftest failed: {0}")]
    SelfTest(String),
}

impl CliError {
    pub fn field(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Field { field, message: message.into() }
    }

    pub fn argument(arg: &'static str, message: impl Into<String>) -> Self {
        CliError::Argument { arg, message: message.into() }
    }

    /// Process exit status: 2 for early stops, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::EarlyStop(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
