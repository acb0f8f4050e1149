use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({x:.3e}, {y:.3e}) m lies inside a conductor or its guard zone")]
    GuardZone { x: f64, y: f64 },

    #[error("evaluation window contains no grid points")]
    EmptyWindow,

    #[error("field map is degenerate: {0}")]
    DegenerateField(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("off-resonant baseline cannot be identified: {0}")]
    InsufficientSpan(String),

    #[error("fit did not converge (best rms residual {best_residual:.3e})")]
    FitFailed { best_residual: f64 },

    #[error("fit rejected: {0}")]
    RejectedFit(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("maximum not bracketed inside [{lo:.6e}, {hi:.6e}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("sweeps do not overlap in field")]
    NonOverlapping,

    #[error("dispersive quantities are undefined at zero detuning")]
    ZeroDetuning,
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}
