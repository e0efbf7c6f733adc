//! Crate-wide error type, mapped onto the CLI exit-code contract.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user input: malformed config, non-monotone table samples,
    /// out-of-range parameters. CLI exit code 2.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// The potential violates the no-zero-energy-state convention
    /// (singular `I + K`, vanishing asymptotic slope). CLI exit code 1.
    #[error("convention violated: {0}")]
    ConventionViolated(String),

    /// Numerical failure: non-convergent refinement, evaluation too close
    /// to a quadrature node, stencil leaving the domain. CLI exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI contract: 1 convention violated, 2 input
    /// error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConventionViolated(_) => 1,
            Error::MalformedInput(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
