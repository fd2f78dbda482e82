use std::fmt;

/// Errors produced by the library.
///
/// Exact and float modes are separate `Scalar` types, so mode mixing is
/// rejected at compile time; the parse errors below are the runtime face of
/// the same contract at the text boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// θ must be strictly positive.
    ThetaNotPositive { text: String },
    /// Spectral operations require n ≥ 2.
    NTooSmall { n: usize },
    /// Vector or matrix dimension does not match the session's n.
    DimensionMismatch { expected: usize, got: usize },
    /// An index was outside 1..=n.
    IndexOutOfRange { index: usize, n: usize },
    /// The Rayleigh quotient is undefined on the zero vector.
    ZeroWeightVector,
    /// A lower hypergeometric parameter hits zero inside the truncated sum.
    PfqPole { lower: String, term: usize },
    /// A cross-checked identity failed in exact arithmetic.
    IdentityViolation {
        identity: &'static str,
        detail: String,
    },
    /// Exhaustive enumeration requested beyond the support guard.
    EnumerationGuard { n: usize, max: usize },
    /// A scalar literal could not be parsed in the requested mode.
    ParseScalar { text: String, mode: &'static str },
    /// The float eigensolver did not converge.
    SolverFailure { detail: String },
    /// A sample-based estimate needs at least `min` draws.
    CountTooSmall { count: usize, min: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ThetaNotPositive { text } => {
                write!(f, "theta must be > 0, got {text}")
            }
            Error::NTooSmall { n } => {
                write!(f, "n must be at least 2, got {n}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, n } => {
                write!(f, "index {index} outside 1..={n}")
            }
            Error::ZeroWeightVector => {
                write!(f, "weight vector must be nonzero")
            }
            Error::PfqPole { lower, term } => {
                write!(
                    f,
                    "lower parameter {lower} hits zero at term {term} of the series"
                )
            }
            Error::IdentityViolation { identity, detail } => {
                write!(f, "identity {identity} violated: {detail}")
            }
            Error::EnumerationGuard { n, max } => {
                write!(
                    f,
                    "enumeration guard: n = {n} exceeds supported maximum {max}"
                )
            }
            Error::ParseScalar { text, mode } => {
                write!(f, "cannot parse {text:?} as a {mode}-mode scalar")
            }
            Error::SolverFailure { detail } => {
                write!(f, "eigensolver failure: {detail}")
            }
            Error::CountTooSmall { count, min } => {
                write!(f, "sample count {count} below minimum {min}")
            }
        }
    }
}

impl std::error::Error for Error {}
