use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument outside the domain of {operation}: {detail}")]
    Domain {
        operation: &'static str,
        detail: String,
    },

    #[error("quadrature tolerance not met after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    ToleranceNotMet {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("no sign change found on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("path {path} exceeded the cap of {cap} events")]
    EventCapExceeded { path: u64, cap: u64 },

    /// Overflow or cancellation left a result that is not a finite number.
    #[error("{operation} is not finite in double precision ({value})")]
    NonFinite { operation: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(operation: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            operation,
            detail: detail.into(),
        }
    }

    /// Passes finite values through and turns the rest into [`Error::NonFinite`].
    pub(crate) fn finite(operation: &'static str, value: f64) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { operation, value })
        }
    }

    /// True for failures caused by caller input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::InvalidConfig(_)
        )
    }
}
