use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Hilbert space dimension {product} exceeds the limit {limit} (cutoffs {cutoffs:?})")]
    Capacity {
        cutoffs: [usize; 4],
        product: u128,
        limit: usize,
    },

    #[error("invalid mode index {0}; expected 0..=3 (opt1, opt2, mec1, mec2)")]
    InvalidMode(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "series for exp(A)v did not converge after {iterations} terms (residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("tolerance unachievable: {0}")]
    ToleranceUnachievable(String),

    #[error("undefined period: {0}")]
    UndefinedPeriod(String),

    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),

    #[error("insufficient oscillation in '{observable}': found {extrema} maxima, need at least 2")]
    InsufficientOscillation { observable: String, extrema: usize },

    #[error("unknown observable '{0}'")]
    UnknownObservable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("regime violation for {regime}: {condition}")]
    RegimeViolation { regime: String, condition: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownObservable(_) | Error::InvalidParameter(_) => 2,
            Error::RegimeViolation { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::StepUnderflow { .. }
            | Error::ToleranceUnachievable(_)
            | Error::NonConvergence { .. } => 5,
            _ => 1,
        }
    }
}
