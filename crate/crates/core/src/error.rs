use thiserror::Error;

/// Errors raised by model construction, training, and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("layer expects {expected} inputs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("nonlinear coefficient must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("relative error is undefined for a zero reference coefficient")]
    ZeroReferenceBeta,
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("sample count must be at least 1")]
    ZeroSampleCount,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("grid needs at least {needed} points per dimension, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error("time {0} lies outside the solution domain")]
    TimeOutOfDomain(f64),
    #[error("non-finite loss at epoch {epoch}: data {data_loss}, physics {physics_loss}")]
    NonFiniteLoss {
        epoch: usize,
        data_loss: f64,
        physics_loss: f64,
    },
    #[error("degenerate least-squares system: {0}")]
    DegenerateFit(String),
    #[error("malformed {what} at {path}: {detail}")]
    MalformedFile {
        what: &'static str,
        path: String,
        detail: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
