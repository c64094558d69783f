use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Cayley parameter is singular: det(I + S) = 0")]
    SingularCayley,
    #[error("invalid motion: {0}")]
    InvalidMotion(String),
    #[error("jet order too low: need {required}, have {actual}")]
    OrderTooLow { required: usize, actual: usize },
    #[error("degenerate spectrum: gap {gap:e} is below the guard")]
    DegenerateSpectrum { gap: f64 },
    #[error("frame orientation undefined: |<e_{index}, v>| = {value:e}")]
    AmbiguousOrientation { index: usize, value: f64 },
    #[error("dependent basis: the total-derivative matrix of the basis is singular")]
    DependentBasis,
    #[error("degenerate frame: coefficient vectors are linearly dependent")]
    DegenerateFrame,
    #[error("singular Gram matrix")]
    SingularGram,
    #[error("evaluation point {0} is a pole")]
    PoleHit(String),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("bad config: {field}: {reason}")]
    BadConfig { field: String, reason: String },
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("{0} is not algebraic in the jet; evaluate it through the eigenframe")]
    NonAlgebraic(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn bad_config(field: &str, reason: impl Into<String>) -> Self {
        Error::BadConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
