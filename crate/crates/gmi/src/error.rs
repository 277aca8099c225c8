//! Error type shared by the rate-estimation APIs.

use thiserror::Error;

/// Errors from LLR computation, rate estimation, and shaping helpers.
#[derive(Debug, Error)]
pub enum GmiError {
    #[error("noise variance must be positive and finite (snr {snr_db} dB gave {sigma2})")]
    ZeroNoiseVariance { snr_db: f64, sigma2: f64 },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),
    #[error("constellation does not factor into independent 2D components: {0}")]
    NonProduct(String),
    #[error("target entropy {target} bits is not attainable (must lie in (0, {max}))")]
    UnattainableEntropy { target: f64, max: f64 },
    #[error("blocklength must be at least 1")]
    ZeroBlocklength,
}
