use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a mathematical precondition (electron counts, dimensions, SPD-ness).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input text. `line` is 1-based; 0 when the failure is not tied to a line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Well-formed input that fails a semantic check (norm, symmetry, shape).
    #[error("validation error: {0}")]
    Validation(String),

    /// A configured size cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An overlap matrix is too close to singular to invert.
    #[error("ill-conditioned matrix: condition number {condition:.3e} exceeds {cap:.3e} (smallest eigenvalue {smallest_eigenvalue:.6e})")]
    IllConditioned {
        condition: f64,
        cap: f64,
        smallest_eigenvalue: f64,
    },

    /// An internal consistency check failed, which points at inconsistent inputs upstream.
    #[error("pipeline integrity violated: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
