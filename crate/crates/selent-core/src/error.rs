//! Error type shared across the crate.

use core::fmt;

/// Failure modes of the numerical routines and estimator constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    Domain {
        /// Name of the offending parameter.
        what: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureNoConverge {
        /// Subdivision budget that was exhausted.
        max_subdivisions: usize,
        /// Error estimate at the point of giving up.
        err_estimate: f64,
    },
    /// Root bracketing failed: the function has the same sign at both ends.
    InvalidBracket {
        /// Left endpoint.
        a: f64,
        /// Right endpoint.
        b: f64,
    },
    /// A simulation configuration failed validation.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => {
                write!(
                    f,
                    "domain error: {what} = {value} is outside the valid range"
                )
            }
            Error::QuadratureNoConverge {
                max_subdivisions,
                err_estimate,
            } => write!(
                f,
                "quadrature did not converge after {max_subdivisions} subdivisions \
                 (error estimate {err_estimate:e})"
            ),
            Error::InvalidBracket { a, b } => {
                write!(f, "invalid bracket [{a}, {b}]: no sign change")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
