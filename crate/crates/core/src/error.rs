//! Crate-wide error type.

/// Errors produced by state validation, model construction and time
/// integration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("deformation gradient has non-positive determinant (det = {0})")]
    NonPositiveDeterminant(f64),

    #[error("absolute temperature must be strictly positive (theta = {0})")]
    NonPositiveTemperature(f64),

    #[error("internal-variable dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("symmetry candidate must be unimodular (det S = {0})")]
    InvalidSymmetry(f64),

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("internal strain determinant collapsed at t = {t} (det F_i = {det})")]
    DetFiCollapse { t: f64, det: f64 },

    #[error("config parse error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
