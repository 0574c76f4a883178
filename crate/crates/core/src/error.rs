use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A `-s` power was requested for the `(λ, ρ) = (0, 0)` mode.
    #[error("singular mode (k = {mode}, frequency index = {frequency}); project out the zero mode first")]
    SingularMode { mode: usize, frequency: usize },

    #[error("time window too small: wrap-around mass {wrap_mass:.3e} exceeds {threshold:.1e}")]
    WindowTooSmall { wrap_mass: f64, threshold: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("too few samples: found {found}, need at least {required}")]
    TooFewSamples { found: usize, required: usize },

    #[error("singular point: {0}")]
    SingularPoint(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::GridMismatch(msg.into())
    }
}
