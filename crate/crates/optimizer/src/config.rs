//! Optimizer settings, progress traces, and error types.

use shape4d_constellation::{ConstellationError, NotOrthantSymmetric};
use shape4d_gmi::{AwgnSpec, GmiError};
use thiserror::Error;

/// Settings shared by the label and coordinate optimizers.
///
/// `max_iterations` counts scan passes for the pairwise optimizers and
/// individual proposals for the stochastic ascent. The objective is always
/// the exact-LLR GMI evaluated on a frozen noise batch, so two candidates
/// within one pass are compared on identical randomness.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Operating SNR the search targets, in dB (informational; the noise
    /// variance actually used comes from the channel spec).
    pub target_snr_db: f64,
    /// Monte-Carlo samples per objective evaluation batch.
    pub mc_samples_per_eval: usize,
    /// Upper bound on passes / proposals.
    pub max_iterations: usize,
    /// Initial coordinate step size.
    pub initial_step: f64,
    /// Multiplicative step shrink applied after each pass / proposal.
    pub step_decay: f64,
    /// Mean symbol energy every candidate is renormalized to.
    pub power_constraint_es: f64,
    /// Seed for evaluation batches and proposal draws.
    pub rng_seed: u64,
    /// Step size below which the search stops.
    pub convergence_tol: f64,
}

impl OptimizerConfig {
    /// Defaults for pass-structured coordinate search over orthant seeds.
    pub fn at_snr(snr_db: f64) -> Self {
        Self {
            target_snr_db: snr_db,
            mc_samples_per_eval: 50_000,
            max_iterations: 30,
            initial_step: 0.08,
            step_decay: 0.85,
            power_constraint_es: 2.0,
            rng_seed: 1,
            convergence_tol: 1e-4,
        }
    }

    /// Defaults for per-proposal stochastic ascent on free coordinates.
    pub fn unconstrained_at_snr(snr_db: f64) -> Self {
        Self {
            target_snr_db: snr_db,
            mc_samples_per_eval: 50_000,
            max_iterations: 2000,
            initial_step: 0.02,
            step_decay: 0.9985,
            power_constraint_es: 2.0,
            rng_seed: 1,
            convergence_tol: 1e-4,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), OptimizerError> {
        if self.mc_samples_per_eval == 0 {
            return Err(OptimizerError::InvalidConfig(
                "mc_samples_per_eval must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(OptimizerError::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(OptimizerError::InvalidConfig(format!(
                "initial_step {} must be positive and finite",
                self.initial_step
            )));
        }
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(OptimizerError::InvalidConfig(format!(
                "step_decay {} must lie in (0, 1]",
                self.step_decay
            )));
        }
        if !(self.power_constraint_es > 0.0) || !self.power_constraint_es.is_finite() {
            return Err(OptimizerError::InvalidConfig(format!(
                "power_constraint_es {} must be positive and finite",
                self.power_constraint_es
            )));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(OptimizerError::InvalidConfig(format!(
                "convergence_tol {} must be non-negative",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

/// One objective snapshot: pass (or proposal) index, batch GMI with its
/// standard error, the step in force, and how many moves were accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub gmi: f64,
    pub stderr: f64,
    pub step: f64,
    pub accepted: usize,
}

/// Records an accepted move whose coordinate was held at the positivity floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClampEvent {
    pub pass: usize,
    pub row: usize,
    pub dim: usize,
}

/// Full optimization history: one row per pass / proposal plus clamp events.
#[derive(Debug, Clone, Default)]
pub struct OptimizationTrace {
    pub rows: Vec<TraceRow>,
    pub clamp_events: Vec<ClampEvent>,
}

impl OptimizationTrace {
    /// Batch GMI of the most recent row, if any.
    pub fn last_gmi(&self) -> Option<f64> {
        self.rows.last().map(|r| r.gmi)
    }
}

/// Failures across the optimizer entry points.
#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error(transparent)]
    Rate(#[from] GmiError),
    #[error(transparent)]
    Construction(#[from] ConstellationError),
    #[error(transparent)]
    Symmetry(#[from] NotOrthantSymmetric),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}

/// Decorrelates per-pass evaluation batches drawn from one user seed.
pub(crate) fn pass_seed(seed: u64, pass: u64) -> u64 {
    seed ^ pass.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// The pairwise swap algebra assumes the per-symbol priors cancel.
pub(crate) fn require_uniform(spec: &AwgnSpec) -> Result<(), OptimizerError> {
    let m = spec.input_distribution.len();
    let p = 1.0 / m as f64;
    if spec.input_distribution.iter().any(|&q| (q - p).abs() > 1e-12) {
        return Err(OptimizerError::Rate(GmiError::InvalidDistribution(
            "optimizers require a uniform input distribution".into(),
        )));
    }
    Ok(())
}
