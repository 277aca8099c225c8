//! Multi-span WDM transmission over standard single-mode fiber.
//!
//! The chain mirrors a coherent long-haul experiment: RRC pulse shaping,
//! WDM multiplexing, symmetric split-step integration of the Manakov
//! equation per span, lumped EDFAs with ASE loading, and a genie-aided
//! receiver (CD inversion, matched filtering, per-block least-squares
//! scaling) that reports effective SNR and GMI per channel. Units are ps,
//! km, W, and THz throughout; waveforms carry watts directly so launch
//! powers and noise densities stay physical.

mod dsp;
mod error;
mod link;
mod params;
mod propagate;
mod wave;

pub use dsp::{
    apply_dispersion, downsample, matched_filter, rrc_shape, wdm_demux, wdm_mux, MIN_FILTER_SPAN,
};
pub use error::FiberError;
pub use link::{
    receiver_dsp, run_link, ChannelOutcome, FormatAssignment, RxResult, SweepResult,
    EQUALIZER_BLOCK, LINK_FILTER_SPAN,
};
pub use params::{FiberParams, LinkConfig};
pub use propagate::{ase_psd_w_per_hz, edfa, propagate_span};
pub use wave::{add_awgn, symbols_to_dual_pol, DualPolWave};
