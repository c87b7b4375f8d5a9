//! Crate-wide error type.
//!
//! Every fallible operation in this crate reports one of the variants below.
//! Guards are reported with the name of the violated guard and the offending
//! quantity instead of silently truncating or wrapping.

use std::fmt;

/// Errors produced by lattice, arithmetic and operator routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two arguments disagree in dimension (e.g. a frequency vector against a
    /// kernel dimension).
    DimensionMismatch { expected: usize, actual: usize },
    /// A parameter is outside its documented domain.
    InvalidParameter { what: &'static str, details: String },
    /// An enumeration or allocation guard would be exceeded.
    GuardExceeded {
        guard: &'static str,
        limit: u128,
        requested: u128,
    },
    /// A documented precondition of the operation does not hold.  The string
    /// names the violated condition.
    PreconditionViolated(String),
    /// Adaptive quadrature could not certify the requested tolerance within
    /// its evaluation budget; `achieved` is the certified error bound reached.
    ToleranceNotReached { requested: f64, achieved: f64 },
    /// Integer or floating-point overflow in an exact computation.
    Overflow { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidParameter { what, details } => {
                write!(f, "invalid parameter {what}: {details}")
            }
            Error::GuardExceeded {
                guard,
                limit,
                requested,
            } => write!(
                f,
                "guard `{guard}` exceeded: requested {requested}, limit {limit}"
            ),
            Error::PreconditionViolated(cond) => {
                write!(f, "precondition violated: {cond}")
            }
            Error::ToleranceNotReached {
                requested,
                achieved,
            } => write!(
                f,
                "tolerance {requested:.3e} not certified; achieved {achieved:.3e}"
            ),
            Error::Overflow { what } => write!(f, "overflow in {what}"),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
