use thiserror::Error;

use crate::poly::Complex;
use crate::roots::RootSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{op} needs degree >= {need}, got {got}")]
    DegreeTooLow {
        op: &'static str,
        need: usize,
        got: usize,
    },

    #[error("{op} needs degree exactly {need}, got {got}")]
    WrongDegree {
        op: &'static str,
        need: usize,
        got: usize,
    },

    #[error("point {0} is a root within tolerance")]
    AtRoot(Complex),

    #[error("point {0} is a critical point within tolerance")]
    CriticalPoint(Complex),

    #[error("invalid stopping criteria: {0}")]
    InvalidCriteria(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A sub-solve ran out of iterations; carries whatever was found.
    #[error("root solver did not converge; partial result holds {} roots", .0.roots.len())]
    ConvergenceFailure(Box<RootSet>),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
