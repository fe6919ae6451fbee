use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group descriptor `{0}`")]
    InvalidGroup(String),

    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: String, found: String },

    #[error("resolution {resolution} is too small: {reason}")]
    ResolutionTooSmall { resolution: u32, reason: String },

    #[error("matrix entry ({i}, {j}) is out of range for an irrep of dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, dim: usize },

    #[error("label {0} lies outside the coefficient cutoff")]
    OutsideCutoff(String),

    #[error("exponent p = {0} is outside the admissible range")]
    InvalidExponent(f64),

    #[error("no quadrature node lies within distance {0} of the identity; increase the resolution")]
    EmptyBall(f64),

    #[error("sampled functions live on different quadrature rules")]
    RuleMismatch,

    #[error("sample {0} is not finite")]
    NonFinite(usize),

    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("family `{name}` is not certified precompact at eps = {eps}: {reason}")]
    NotPrecompact { name: String, eps: f64, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
