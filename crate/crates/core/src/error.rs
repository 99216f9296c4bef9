//! Error type shared by all engine layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    /// A tensor slot index was out of range or had the wrong variance.
    #[error("invalid tensor slot: {0}")]
    InvalidSlot(String),

    /// Tensor shapes or dimensions do not match the operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Metric failed the positive-definiteness factorization.
    #[error("metric is not positive definite at the evaluation point")]
    NotPositiveDefinite,

    /// Input vectors were linearly dependent beyond tolerance.
    #[error("degenerate vector set: {0}")]
    DegenerateInput(String),

    /// A finite-difference stencil would leave the chart domain.
    #[error("point too close to the domain boundary for the stencil (margin {margin:.3e})")]
    StencilMargin { margin: f64 },

    /// Model registry lookup failed.
    #[error("unknown model `{0}`")]
    UnknownModel(String),

    /// Suite name lookup failed.
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    /// A scalar parameter was outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
