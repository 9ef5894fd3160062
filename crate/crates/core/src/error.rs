use thiserror::Error;

/// Errors produced by the verification library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state vector must have at least one amplitude")]
    EmptyState,

    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("basis is not orthonormal: <{i}|{j}> = {value}")]
    NotOrthonormal { i: usize, j: usize, value: f64 },

    #[error("basis has {count} vectors of dimension {dim}")]
    IncompleteBasis { count: usize, dim: usize },

    #[error("basis has {vectors} vectors but {labels} labels")]
    LabelCount { vectors: usize, labels: usize },

    #[error("linear map is singular (|det| = {det_abs})")]
    SingularMap { det_abs: f64 },

    #[error("all primed coefficients vanish")]
    ZeroCoefficients,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("model file line {line}: {message}")]
    ModelParse { line: usize, message: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
