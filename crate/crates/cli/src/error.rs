use std::path::PathBuf;

use g2forge_core::family::FamilyError;
use g2forge_core::g2::G2Error;
use g2forge_core::liealg::LieError;
use g2forge_core::solitons::{FlowError, FlowHalt};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION: i32 = 1;
    pub const BAD_INPUT: i32 = 2;
    pub const DOMAIN: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown {kind} '{name}' (known: {known})")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("structure constants violate the Jacobi identity (residual {0})")]
    NotLie(String),
    #[error(transparent)]
    G2(#[from] G2Error),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Halt(#[from] FlowHalt),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// `0` pass, `1` verification failure, `2` bad input, `3` domain
    /// constraint violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Io { .. }
            | CliError::Config(_)
            | CliError::Json(_)
            | CliError::Csv(_)
            | CliError::Unknown { .. }
            | CliError::Lie(_) => exit::BAD_INPUT,
            CliError::Family(e) => match e {
                FamilyError::UnknownBuiltin(_)
                | FamilyError::MissingParameter(_)
                | FamilyError::UnexpectedParameter => exit::BAD_INPUT,
                _ => exit::DOMAIN,
            },
            CliError::Flow(e) => match e {
                FlowError::Initial(_) => exit::DOMAIN,
                _ => exit::BAD_INPUT,
            },
            CliError::NotLie(_) | CliError::G2(_) | CliError::Halt(_) => exit::DOMAIN,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
