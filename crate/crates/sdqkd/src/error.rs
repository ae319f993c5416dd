//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its declared range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A measurement weight combination violates a feasibility constraint.
    #[error("infeasible measurement: {0}")]
    Constraint(String),

    /// A subsystem tag is missing, duplicated, or dimensionally inconsistent.
    #[error("label error: {0}")]
    Label(String),

    /// A distribution lost all of its mass during post-selection.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// A numerical invariant (trace, normalization, tolerance) was violated.
    #[error("numerical consistency failure: {0}")]
    Consistency(String),

    /// A config file or CLI flag combination could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    /// File I/O failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 validation, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Constraint(_)
            | Error::Label(_)
            | Error::Degenerate(_)
            | Error::Config(_) => 1,
            Error::Consistency(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
