use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("oseledets frame unresolved (direction change {angle:e} rad after {horizon} steps)")]
    FrameUnresolved { angle: f64, horizon: usize },

    #[error("cone image degenerate: boundary rays are antipodal")]
    ConeDegenerate,

    #[error("point is not periodic: residual {residual:e} exceeds {tol:e}")]
    NotPeriodic { residual: f64, tol: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("frequency box mismatch: {0} vs {1}")]
    FrequencyMismatch(usize, usize),
}

impl Error {
    /// Short machine-readable tag, used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidInput(_) => "invalid-input",
            Error::NumericOverflow(_) => "numeric-overflow",
            Error::FrameUnresolved { .. } => "frame-unresolved",
            Error::ConeDegenerate => "cone-degenerate",
            Error::NotPeriodic { .. } => "not-periodic",
            Error::InsufficientData(_) => "insufficient-data",
            Error::InconsistentInputs(_) => "inconsistent-inputs",
            Error::FrequencyMismatch(..) => "frequency-mismatch",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
