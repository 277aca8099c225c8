//! GMI-driven constellation optimizers.
//!
//! Two complementary searches over a frozen Monte-Carlo objective: greedy
//! pairwise label switching (points fixed, labels move) and power-constrained
//! coordinate ascent (labels fixed, points move), the latter in an
//! orthant-symmetric flavor that searches only first-orthant seed rows and a
//! free flavor that perturbs every coordinate. All of them evaluate
//! candidates with the exact-LLR batch GMI so comparisons share identical
//! noise, and every run is reproducible from the config seed.

mod ascent;
mod config;
mod switching;

pub use ascent::{optimize_os, optimize_unconstrained};
pub use config::{ClampEvent, OptimizationTrace, OptimizerConfig, OptimizerError, TraceRow};
pub use switching::binary_switching;
