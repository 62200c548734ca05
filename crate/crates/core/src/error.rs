use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Variants are grouped so front ends can map them to exit statuses:
/// [`Error::is_rejection`] covers range and precondition failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("(F3)(b) fails at t0 = {t0}; start must exceed {min_t0}")]
    InadmissibleStart { t0: f64, min_t0: f64 },

    #[error("shift value overflows at tau = {tau} (usable up to {limit})")]
    Overflow { tau: f64, limit: f64 },

    #[error("|t| = {t} outside the approximate functional equation range; need x > {min_x}")]
    OutOfRange { t: f64, min_x: f64 },

    #[error("s = 1 is a pole")]
    Pole,

    #[error("sigma = {sigma} must exceed 1/2 for the Euler product")]
    SigmaTooSmall { sigma: f64 },

    #[error("prime cutoff {have} too small; need at least {need}")]
    PrimeCutoffTooSmall { have: u64, need: u64 },

    #[error("sum length cap exceeded; largest usable cT is {max_ct}")]
    SumLengthCap { max_ct: f64 },

    #[error("quadrature panel budget exceeded; largest usable T is {max_t}")]
    PanelBudget { max_t: f64 },

    #[error("height {height} exceeds the evaluator cap {cap}")]
    HeightCap { height: f64, cap: f64 },

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch")]
    GridMismatch,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no usable samples: every tau exceeded the height cap {cap}")]
    NoUsableSamples { cap: f64 },

    #[error("target {index} vanishes on the grid")]
    TargetVanishes { index: usize },
}

impl Error {
    /// True for range and precondition rejections.
    pub fn is_rejection(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
