use thiserror::Error;

/// Errors raised by model construction, Gaussian arithmetic and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("process is not stationary: spectral radius {radius:.12} >= 1 - 1e-9")]
    NonStationary { radius: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("no convergence up to horizon {horizon} (last change {last_delta:.3e})")]
    NoConvergence { horizon: usize, last_delta: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonStationary { .. } => "NON_STATIONARY",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::SingularCovariance(_) => "SINGULAR_COVARIANCE",
            Error::UnknownChannel(_) => "UNKNOWN_CHANNEL",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::InsufficientData(_) => "INSUFFICIENT_DATA",
            Error::TopologyMismatch(_) => "TOPOLOGY_MISMATCH",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularCovariance(_) | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
