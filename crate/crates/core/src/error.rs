use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing mandatory key `{0}`")]
    MissingKey(String),

    #[error("key `{key}`: cannot parse `{value}` as a number")]
    NotANumber { key: String, value: String },

    #[error("key `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("curve, line {line}: {reason}")]
    Curve { line: usize, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no bracketing interval: {0}")]
    NoBracket(String),

    #[error(
        "adaptive quadrature did not converge; worst subinterval [{a}, {b}] with error estimate {error:e}"
    )]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("risk-neutral probability {p} outside (0, 1); use a smaller time step")]
    TreeProbability { p: f64 },
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for problems in user input (configuration, curve files, arguments)
    /// as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MissingKey(_)
                | Error::NotANumber { .. }
                | Error::InvalidValue { .. }
                | Error::Syntax { .. }
                | Error::Io { .. }
                | Error::Curve { .. }
                | Error::Argument(_)
        )
    }
}
