//! Information rates over the AWGN channel.
//!
//! Exact and max-log LLR demapping, chunked Monte-Carlo GMI/MI estimation
//! (deterministic per seed, thread-count independent), Gauss–Hermite
//! quadrature for formats that factor into 2D components, Maxwell–Boltzmann
//! amplitude shaping with distribution-matcher rate loss, and a
//! belief-propagation decoding-cost model.

mod complexity;
mod demap;
mod error;
mod estimate;
mod quadrature;
mod shaping;
mod types;

pub use complexity::{decoding_complexity, iterations_for_budget};
pub use demap::{awgn_llrs, LlrBatch, LLR_CLAMP};
pub use error::GmiError;
pub use estimate::{
    gmi_from_received, gmi_mc, gmi_mc_method, gmi_mc_paired, gmi_on_batch, mutual_information,
    EvalBatch, PairedRates, CHUNK_SIZE,
};
pub use quadrature::{gmi_quadrature_2d, hermgauss};
pub use shaping::{
    air_n, ccdm_composition, ccdm_rate_loss, ccdm_report, entropy_bits,
    mb_distribution_for_entropy, CcdmReport,
};
pub use types::{AwgnSpec, LlrMethod, RateMethod, RateReport};
