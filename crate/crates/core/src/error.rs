//! Error type shared across the crate.

/// Errors produced by simulation, filtering, fitting, and optimization.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A filter received a NaN or infinite signal sample.
    #[error("non-finite signal sample: r12={r12}, r23={r23}")]
    NonFiniteSignal { r12: f64, r23: f64 },
    #[error("fit window holds {0} points, need at least 3")]
    FitWindowTooShort(usize),
    /// No parameter choice keeps the initial fidelity drop below 10%.
    #[error("infeasible optimization: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
