use thiserror::Error;

/// Errors raised by the numerical kernels and the series drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible triple ({0}, {1}, {2})")]
    Admissibility(u32, u32, u32),

    #[error("degenerate denominator: {0}")]
    Degenerate(String),

    #[error("series does not converge: {0}")]
    Divergence(String),

    #[error("genus {0} is not supported here: {1}")]
    Genus(u32, String),

    #[error("invalid spine: {0}")]
    Spine(String),

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable tag used in structured CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Admissibility(..) => "AdmissibilityError",
            Error::Degenerate(_) => "DegenerateError",
            Error::Divergence(_) => "DivergenceError",
            Error::Genus(..) => "GenusError",
            Error::Spine(_) => "SpineError",
            Error::Regime(_) => "RegimeError",
            Error::Internal(_) => "InternalError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
