//! Channel specification and rate-report types.

use shape4d_constellation::LabeledConstellation;

use crate::error::GmiError;
use crate::shaping::entropy_bits;

/// LLR computation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LlrMethod {
    Exact,
    /// Nearest-point LLRs. Rate estimates fit the scalar metric scale that
    /// a mismatched-metric rate is defined with (on a seeded pilot block),
    /// since raw max-log LLRs are overconfident at low SNR.
    MaxLog,
}

impl LlrMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            LlrMethod::Exact => "exact",
            LlrMethod::MaxLog => "maxlog",
        }
    }
}

/// How a rate estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    Exact,
    MaxLog,
    Quadrature,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::Exact => "exact",
            RateMethod::MaxLog => "maxlog",
            RateMethod::Quadrature => "quadrature",
        }
    }
}

/// Memoryless AWGN channel at a given SNR with a per-symbol input distribution.
///
/// SNR convention: energy per two real dimensions over the noise density N0,
/// with N0 = 2σ² per real dimension, i.e. σ² = Es/(N·snr_lin). Differences in
/// dB between formats normalized to the same Es are convention-free.
#[derive(Debug, Clone)]
pub struct AwgnSpec {
    pub snr_db: f64,
    /// σ² of the real Gaussian noise added to each coordinate.
    pub noise_variance_per_real_dim: f64,
    /// Per-symbol transmit probabilities, summing to 1.
    pub input_distribution: Vec<f64>,
}

impl AwgnSpec {
    /// Uniform input distribution at the given SNR.
    pub fn new(c: &LabeledConstellation, snr_db: f64) -> Result<Self, GmiError> {
        let m = c.num_points();
        Self::with_distribution(c, snr_db, vec![1.0 / m as f64; m])
    }

    /// Nonuniform per-symbol input distribution. The SNR refers to the
    /// energy actually transmitted, so Es is weighted by the priors.
    pub fn with_distribution(
        c: &LabeledConstellation,
        snr_db: f64,
        probs: Vec<f64>,
    ) -> Result<Self, GmiError> {
        if probs.len() != c.num_points() {
            return Err(GmiError::DimensionMismatch {
                detail: format!(
                    "distribution has {} entries for {} points",
                    probs.len(),
                    c.num_points()
                ),
            });
        }
        let es: f64 = (0..c.num_points())
            .map(|i| probs[i] * c.point(i).iter().map(|&x| x * x).sum::<f64>())
            .sum();
        let snr_lin = 10f64.powf(snr_db / 10.0);
        let sigma2 = es / (c.n_dims() as f64 * snr_lin);
        Self::from_parts(snr_db, sigma2, probs)
    }

    /// Builds a spec from an explicitly chosen noise variance.
    pub fn from_parts(
        snr_db: f64,
        sigma2: f64,
        probs: Vec<f64>,
    ) -> Result<Self, GmiError> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(GmiError::ZeroNoiseVariance { snr_db, sigma2 });
        }
        validate_distribution(&probs)?;
        Ok(Self {
            snr_db,
            noise_variance_per_real_dim: sigma2,
            input_distribution: probs,
        })
    }

    /// Source entropy H(X) of the input distribution, in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.input_distribution)
    }
}

pub(crate) fn validate_distribution(probs: &[f64]) -> Result<(), GmiError> {
    if probs.is_empty() {
        return Err(GmiError::InvalidDistribution("empty".into()));
    }
    let mut sum = 0.0;
    for &p in probs {
        if !p.is_finite() || p < 0.0 {
            return Err(GmiError::InvalidDistribution(format!(
                "entry {p} is negative or non-finite"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(GmiError::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// Estimated information rates with Monte-Carlo error.
#[derive(Debug, Clone, Copy)]
pub struct RateReport {
    /// Bit-metric (BICM) rate, bits per symbol.
    pub gmi_bits_per_sym: f64,
    /// Symbol-wise mutual information, bits per symbol.
    pub mi_bits_per_sym: f64,
    /// Standard error of the headline estimate (GMI for `gmi_mc`,
    /// MI for `mutual_information`); zero for quadrature.
    pub stderr: f64,
    pub n_samples: usize,
    pub method: RateMethod,
}
