//! Error type shared by all modules.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes surfaced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// A root bracket did not change sign where the theory guarantees it.
    BracketFailure { what: &'static str },
    /// No point of the search region satisfies the constraints.
    Infeasible { what: &'static str },
    /// A probability table violates normalization or positivity.
    InvalidDistribution { what: &'static str },
    /// The objective has no sign change over the threshold bracket.
    NoSignChange { param: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => {
                write!(f, "domain error: {what} (got {value})")
            }
            Error::BracketFailure { what } => {
                write!(f, "bracket failure in {what}")
            }
            Error::Infeasible { what } => write!(f, "infeasible: {what}"),
            Error::InvalidDistribution { what } => {
                write!(f, "invalid distribution: {what}")
            }
            Error::NoSignChange { param } => {
                write!(f, "no sign change in {param} over the bracket")
            }
        }
    }
}

impl core::error::Error for Error {}
