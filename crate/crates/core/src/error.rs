use thiserror::Error;

/// Errors raised by the phase-space library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("support overflow: {0}")]
    SupportOverflow(String),

    #[error("non-Hermitian input: residual {residual:.3e} exceeds {tolerance:.1e}")]
    NonHermitianInput { residual: f64, tolerance: f64 },

    #[error("unstable step at index {step}: {reason}")]
    UnstableStep { step: usize, reason: String },

    #[error("argument {value} outside calibrated range ±{limit:.4} for dimension {dim}")]
    TruncationRange { value: f64, limit: f64, dim: usize },

    #[error("matrix exponential lost unitarity: drift {0:.3e}")]
    UnitarityDrift(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
