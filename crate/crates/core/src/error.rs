use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range (presentation has {n} generators)")]
    GeneratorOutOfRange { index: usize, n: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown group `{0}` (expected U1, SU2, SO3 or a product such as SU2xU1)")]
    UnknownGroup(String),

    #[error("logarithm undefined: rotation angle {angle:.9} too close to the cut locus")]
    LogDomain { angle: f64 },

    #[error("element is not central (residual {residual:.3e})")]
    NotCentral { residual: f64 },

    #[error("element does not stabilize the representation (residual {residual:.3e})")]
    NotStabilizing { residual: f64 },

    #[error("cochain is not a cocycle (|D1 u| = {residual:.3e})")]
    NotCocycle { residual: f64 },

    #[error("no convergence after {iterations} iterations (defect {defect:.3e})")]
    NoConvergence { iterations: usize, defect: f64 },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("group has an infinite center; central representations cannot be enumerated")]
    InfiniteCenter,
}

pub type Result<T> = std::result::Result<T, Error>;
