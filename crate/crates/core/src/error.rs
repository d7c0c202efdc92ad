use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at {location}")]
    NonFinite { location: String },

    /// The Euler chart degenerates where `sin(beta)` vanishes.
    #[error("singular Euler chart (sin beta = {sin_beta:e})")]
    SingularChart { sin_beta: f64 },

    /// Evaluation inside the guard neighbourhood of the nodal set `rho = 0`.
    #[error("near nodal set: density {density:e} below floor {floor:e}")]
    NearNode { density: f64, floor: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("trajectory aborted: {0}")]
    TrajectoryAbort(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn non_finite(location: impl Into<String>) -> Self {
        Error::NonFinite {
            location: location.into(),
        }
    }
}
