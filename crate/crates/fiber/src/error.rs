//! Error type shared across the transmission pipeline.

use shape4d_gmi::GmiError;
use thiserror::Error;

/// Failures from waveform construction, propagation, or reception.
#[derive(Debug, Error)]
pub enum FiberError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("RRC filter span of {span_symbols} symbols is too short (minimum {min})")]
    FilterSpanTooShort { span_symbols: usize, min: usize },
    #[error("WDM band of {required_ghz:.2} GHz exceeds the sampled band of {available_ghz:.2} GHz")]
    Aliasing { required_ghz: f64, available_ghz: f64 },
    #[error("waveform became non-finite at split step {step} (z = {z_km:.2} km)")]
    NonFinite { step: usize, z_km: f64 },
    #[error("effective SNR non-finite on channel {channel} (signal {signal}, error {error_power})")]
    NonFiniteSnr {
        channel: usize,
        signal: f64,
        error_power: f64,
    },
    #[error("{n_symbols} symbols cannot be split into {block}-symbol equalizer blocks")]
    BlockMismatch { n_symbols: usize, block: usize },
    #[error("waveform length mismatch: {0}")]
    LengthMismatch(String),
    #[error(transparent)]
    Rate(#[from] GmiError),
}
