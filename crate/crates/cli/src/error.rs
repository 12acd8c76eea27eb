use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Library(#[from] bilinear_jsr::Error),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short tag for the diagnostic line.
    pub fn kind(&self) -> &'static str {
        use bilinear_jsr::Error as E;
        match self {
            CliError::Parse(_) => "parse",
            CliError::Io { .. } => "io",
            CliError::Verification(_) => "verification",
            CliError::Library(E::ResourceCap { .. }) => "resource_cap",
            CliError::Library(E::SelfValidation(_)) => "verification",
            CliError::Library(E::NonConvergence(_)) => "non_convergence",
            CliError::Library(_) => "invalid_input",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "resource_cap" => 3,
            "verification" | "non_convergence" => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
