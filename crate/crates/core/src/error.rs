use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero polynomial has no squarefree decomposition")]
    ZeroPolynomial,

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid point cluster: {0}")]
    InvalidCluster(String),

    #[error("divisor has degree {0}, expected 0")]
    NonzeroDegree(Rational),

    #[error("principal divisor support meets tail point {0}")]
    TailCollision(String),

    #[error("branch {0} is ambiguous: cluster splits across differently profiled branches")]
    AmbiguousBranch(String),

    #[error("invalid adelic divisor: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
