use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] deloc_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: deloc_core::Error },

    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use deloc_core::Error as E;
        let core = match self {
            CliError::Core(e) | CliError::Input { source: e, .. } => e,
            CliError::Config { .. } => return 2,
            CliError::Io { .. } | CliError::Usage(_) => return 3,
        };
        match core {
            E::Parse { .. } => 2,
            E::Domain(_) | E::Validation(_) => 3,
            E::Resource(_) => 4,
            E::Integrity(_) => 5,
            E::IllConditioned { .. } => 6,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
