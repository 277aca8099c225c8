//! Monte-Carlo estimators for GMI and symbol-wise MI on the AWGN channel.
//!
//! Samples are processed in fixed-size chunks, each with its own
//! counter-based RNG stream; partial sums reduce in chunk-index order, so
//! results are bit-identical for a fixed seed regardless of worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use shape4d_constellation::LabeledConstellation;

use crate::demap::Demapper;
use crate::error::GmiError;
use crate::types::{AwgnSpec, LlrMethod, RateMethod, RateReport};

/// Samples per RNG stream; part of the deterministic-result contract.
pub const CHUNK_SIZE: usize = 4096;

const MIN_SAMPLES: usize = 1000;

/// Pilot samples used to fit the max-log metric scale; the fitted scale's
/// residual rate error is quadratic in its offset and far below MC noise.
const SCALE_PILOT: usize = 32_768;

#[derive(Clone, Copy, Default)]
struct Accum {
    g: f64,
    g2: f64,
    mi: f64,
    mi2: f64,
}

impl Accum {
    fn push(&mut self, g: f64, mi: f64) {
        self.g += g;
        self.g2 += g * g;
        self.mi += mi;
        self.mi2 += mi * mi;
    }

    fn merge(mut self, o: &Accum) -> Accum {
        self.g += o.g;
        self.g2 += o.g2;
        self.mi += o.mi;
        self.mi2 += o.mi2;
        self
    }
}

fn mean_and_stderr(sum: f64, sum_sq: f64, n: f64) -> (f64, f64) {
    let mean = sum / n;
    let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

struct Rates {
    gmi: f64,
    mi: f64,
    se_gmi: f64,
    se_mi: f64,
}

/// Signed max-log decision margins (positive when the LLR favors the
/// transmitted bit) for the leading chunks of the sample stream.
fn maxlog_pilot_margins(
    c: &LabeledConstellation,
    demap: &Demapper,
    cum: &[f64],
    sigma: f64,
    n_pilot: usize,
    seed: u64,
) -> Vec<f64> {
    let nd = c.n_dims();
    let bits = demap.bits;
    let mut margins = Vec::with_capacity(n_pilot * bits);
    let mut a = vec![0.0; c.num_points()];
    let mut y = vec![0.0; nd];
    let mut llr = vec![0.0; bits];
    for ci in 0..n_pilot.div_ceil(CHUNK_SIZE) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ci as u64);
        let lo = ci * CHUNK_SIZE;
        let hi = (lo + CHUNK_SIZE).min(n_pilot);
        for _ in lo..hi {
            let u: f64 = rng.gen();
            let t = pick(cum, u);
            let xt = c.point(t);
            for d in 0..nd {
                let z: f64 = rng.sample(StandardNormal);
                y[d] = xt[d] + sigma * z;
            }
            demap.scores(&y, &mut a);
            demap.llrs_into(&a, LlrMethod::MaxLog, &mut llr);
            for k in 0..bits {
                let sgn = if demap.tx_bit(t, k) == 0 { 1.0 } else { -1.0 };
                margins.push(sgn * llr[k]);
            }
        }
    }
    margins
}

/// Scale minimizing the average bit-metric loss over the pilot margins.
/// Raw max-log LLRs are overconfident at low SNR; the rate of a mismatched
/// metric comes with this one-parameter freedom, and the loss is convex in
/// it, so a golden-section search suffices.
fn best_metric_scale(margins: &[f64]) -> f64 {
    let f = |s: f64| {
        margins
            .iter()
            .map(|&t| crate::demap::log1pexp(-s * t))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (1e-3f64, 8.0f64);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn mc_engine(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    n_samples: usize,
    seed: u64,
    method: LlrMethod,
) -> Result<Rates, GmiError> {
    if n_samples < MIN_SAMPLES {
        return Err(GmiError::TooFewSamples {
            got: n_samples,
            min: MIN_SAMPLES,
        });
    }
    let demap = Demapper::from_constellation(
        c,
        &spec.input_distribution,
        spec.noise_variance_per_real_dim,
    )?;
    let sigma = spec.noise_variance_per_real_dim.sqrt();
    let cum = cumulative(&spec.input_distribution);
    let scale = match method {
        LlrMethod::Exact => 1.0,
        LlrMethod::MaxLog => {
            let pilot =
                maxlog_pilot_margins(c, &demap, &cum, sigma, n_samples.min(SCALE_PILOT), seed);
            best_metric_scale(&pilot)
        }
    };
    let nd = c.n_dims();
    let m = c.num_points();
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let accums: Vec<Accum> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let lo = ci * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_samples);
            let mut a = vec![0.0; m];
            let mut y = vec![0.0; nd];
            let mut acc = Accum::default();
            for _ in lo..hi {
                let u: f64 = rng.gen();
                let t = pick(&cum, u);
                let xt = c.point(t);
                for d in 0..nd {
                    let z: f64 = rng.sample(StandardNormal);
                    y[d] = xt[d] + sigma * z;
                }
                demap.scores(&y, &mut a);
                let (g, mi) = match method {
                    LlrMethod::Exact => demap.exact_losses(&a, t),
                    LlrMethod::MaxLog => demap.maxlog_losses(&a, t, scale),
                };
                acc.push(g, mi);
            }
            acc
        })
        .collect();
    let total = accums.iter().fold(Accum::default(), Accum::merge);
    let n = n_samples as f64;
    let h = spec.entropy_bits();
    let (mean_g, se_gmi) = mean_and_stderr(total.g, total.g2, n);
    let (mean_mi, se_mi) = mean_and_stderr(total.mi, total.mi2, n);
    Ok(Rates {
        gmi: h - mean_g,
        mi: h - mean_mi,
        se_gmi,
        se_mi,
    })
}

/// Monte-Carlo GMI estimate (exact LLRs); also reports the symbol-wise MI
/// from the same samples. Deterministic for a fixed seed.
pub fn gmi_mc(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    n_samples: usize,
    seed: u64,
) -> Result<RateReport, GmiError> {
    gmi_mc_method(c, spec, n_samples, seed, LlrMethod::Exact)
}

/// As [`gmi_mc`] but with a selectable LLR rule for the bit metric.
pub fn gmi_mc_method(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    n_samples: usize,
    seed: u64,
    method: LlrMethod,
) -> Result<RateReport, GmiError> {
    let r = mc_engine(c, spec, n_samples, seed, method)?;
    Ok(RateReport {
        gmi_bits_per_sym: r.gmi,
        mi_bits_per_sym: r.mi,
        stderr: r.se_gmi,
        n_samples,
        method: match method {
            LlrMethod::Exact => RateMethod::Exact,
            LlrMethod::MaxLog => RateMethod::MaxLog,
        },
    })
}

/// Monte-Carlo symbol-wise mutual information; `stderr` refers to the MI.
pub fn mutual_information(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    n_samples: usize,
    seed: u64,
) -> Result<RateReport, GmiError> {
    let r = mc_engine(c, spec, n_samples, seed, LlrMethod::Exact)?;
    Ok(RateReport {
        gmi_bits_per_sym: r.gmi,
        mi_bits_per_sym: r.mi,
        stderr: r.se_mi,
        n_samples,
        method: RateMethod::Exact,
    })
}

/// Two rate estimates sharing every transmit index and noise draw, with the
/// standard error of their GMI difference.
#[derive(Debug, Clone, Copy)]
pub struct PairedRates {
    pub a: RateReport,
    pub b: RateReport,
    /// `a.gmi − b.gmi`.
    pub gmi_diff: f64,
    pub gmi_diff_stderr: f64,
}

#[derive(Clone, Copy, Default)]
struct PairAccum {
    a: Accum,
    b: Accum,
    d: f64,
    d2: f64,
}

/// Evaluates two same-size constellations on common random numbers: each
/// sample applies one transmit index and one noise vector to both.
pub fn gmi_mc_paired(
    c_a: &LabeledConstellation,
    c_b: &LabeledConstellation,
    spec_a: &AwgnSpec,
    spec_b: &AwgnSpec,
    n_samples: usize,
    seed: u64,
) -> Result<PairedRates, GmiError> {
    if c_a.num_points() != c_b.num_points() || c_a.n_dims() != c_b.n_dims() {
        return Err(GmiError::DimensionMismatch {
            detail: "paired estimation needs equal point counts and dimensions".into(),
        });
    }
    if spec_a.input_distribution != spec_b.input_distribution {
        return Err(GmiError::InvalidDistribution(
            "paired estimation needs identical input distributions".into(),
        ));
    }
    if n_samples < MIN_SAMPLES {
        return Err(GmiError::TooFewSamples {
            got: n_samples,
            min: MIN_SAMPLES,
        });
    }
    let demap_a = Demapper::from_constellation(
        c_a,
        &spec_a.input_distribution,
        spec_a.noise_variance_per_real_dim,
    )?;
    let demap_b = Demapper::from_constellation(
        c_b,
        &spec_b.input_distribution,
        spec_b.noise_variance_per_real_dim,
    )?;
    let sigma_a = spec_a.noise_variance_per_real_dim.sqrt();
    let sigma_b = spec_b.noise_variance_per_real_dim.sqrt();
    let cum = cumulative(&spec_a.input_distribution);
    let nd = c_a.n_dims();
    let m = c_a.num_points();
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let accums: Vec<PairAccum> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let lo = ci * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_samples);
            let mut a = vec![0.0; m];
            let mut y = vec![0.0; nd];
            let mut z = vec![0.0; nd];
            let mut acc = PairAccum::default();
            for _ in lo..hi {
                let u: f64 = rng.gen();
                let t = pick(&cum, u);
                for zd in z.iter_mut() {
                    *zd = rng.sample(StandardNormal);
                }
                let xa = c_a.point(t);
                for d in 0..nd {
                    y[d] = xa[d] + sigma_a * z[d];
                }
                demap_a.scores(&y, &mut a);
                let (ga, mia) = demap_a.exact_losses(&a, t);
                let xb = c_b.point(t);
                for d in 0..nd {
                    y[d] = xb[d] + sigma_b * z[d];
                }
                demap_b.scores(&y, &mut a);
                let (gb, mib) = demap_b.exact_losses(&a, t);
                acc.a.push(ga, mia);
                acc.b.push(gb, mib);
                let d = ga - gb;
                acc.d += d;
                acc.d2 += d * d;
            }
            acc
        })
        .collect();
    let mut total = PairAccum::default();
    for acc in &accums {
        total.a = total.a.merge(&acc.a);
        total.b = total.b.merge(&acc.b);
        total.d += acc.d;
        total.d2 += acc.d2;
    }
    let n = n_samples as f64;
    let h = spec_a.entropy_bits();
    let report = |acc: Accum| {
        let (mean_g, se_g) = mean_and_stderr(acc.g, acc.g2, n);
        let (mean_mi, _) = mean_and_stderr(acc.mi, acc.mi2, n);
        RateReport {
            gmi_bits_per_sym: h - mean_g,
            mi_bits_per_sym: h - mean_mi,
            stderr: se_g,
            n_samples,
            method: RateMethod::Exact,
        }
    };
    let ra = report(total.a);
    let rb = report(total.b);
    let (_, se_d) = mean_and_stderr(total.d, total.d2, n);
    Ok(PairedRates {
        a: ra,
        b: rb,
        gmi_diff: ra.gmi_bits_per_sym - rb.gmi_bits_per_sym,
        gmi_diff_stderr: se_d,
    })
}

/// A frozen set of (transmit index, unit-variance noise) draws for
/// common-random-number comparison of candidate constellations.
#[derive(Debug, Clone)]
pub struct EvalBatch {
    pub tx: Vec<usize>,
    /// n × n_dims, unit variance; scaled by √sigma2 at evaluation time.
    pub noise: Vec<f64>,
    pub n_dims: usize,
    pub sigma2: f64,
}

impl EvalBatch {
    /// Draws a batch with uniform transmit indices over `m` points, using
    /// the same chunked stream discipline as [`gmi_mc`].
    pub fn generate(m: usize, n_dims: usize, sigma2: f64, n_samples: usize, seed: u64) -> Self {
        let probs = vec![1.0 / m as f64; m];
        let cum = cumulative(&probs);
        let mut tx = Vec::with_capacity(n_samples);
        let mut noise = Vec::with_capacity(n_samples * n_dims);
        let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
        for ci in 0..n_chunks {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let lo = ci * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_samples);
            for _ in lo..hi {
                let u: f64 = rng.gen();
                tx.push(pick(&cum, u));
                for _ in 0..n_dims {
                    let z: f64 = rng.sample(StandardNormal);
                    noise.push(z);
                }
            }
        }
        Self {
            tx,
            noise,
            n_dims,
            sigma2,
        }
    }

    pub fn len(&self) -> usize {
        self.tx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tx.is_empty()
    }
}

/// Exact uniform-prior GMI of a constellation on a frozen batch; returns
/// (gmi, stderr). Identical batches yield identical values across candidates.
pub fn gmi_on_batch(
    c: &LabeledConstellation,
    batch: &EvalBatch,
) -> Result<(f64, f64), GmiError> {
    if c.n_dims() != batch.n_dims {
        return Err(GmiError::DimensionMismatch {
            detail: format!("{} dims vs batch {}", c.n_dims(), batch.n_dims),
        });
    }
    let m = c.num_points();
    if batch.tx.iter().any(|&t| t >= m) {
        return Err(GmiError::DimensionMismatch {
            detail: "batch transmit index out of range".into(),
        });
    }
    let priors = vec![1.0 / m as f64; m];
    let demap = Demapper::from_constellation(c, &priors, batch.sigma2)?;
    let sigma = batch.sigma2.sqrt();
    let nd = batch.n_dims;
    let n_samples = batch.len();
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let accums: Vec<Accum> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_samples);
            let mut a = vec![0.0; m];
            let mut y = vec![0.0; nd];
            let mut acc = Accum::default();
            for i in lo..hi {
                let t = batch.tx[i];
                let xt = c.point(t);
                for d in 0..nd {
                    y[d] = xt[d] + sigma * batch.noise[i * nd + d];
                }
                demap.scores(&y, &mut a);
                let (g, mi) = demap.exact_losses(&a, t);
                acc.push(g, mi);
            }
            acc
        })
        .collect();
    let total = accums.iter().fold(Accum::default(), Accum::merge);
    let n = n_samples as f64;
    let (mean_g, se) = mean_and_stderr(total.g, total.g2, n);
    Ok((c.bits_per_symbol() as f64 - mean_g, se))
}

/// Exact-LLR rates for an externally produced received block (e.g. fiber
/// simulation residuals) with a measured noise variance per real dimension.
pub fn gmi_from_received(
    c: &LabeledConstellation,
    tx_indices: &[usize],
    rx_symbols: &[f64],
    sigma2: f64,
    priors: Option<&[f64]>,
) -> Result<RateReport, GmiError> {
    let nd = c.n_dims();
    let m = c.num_points();
    if rx_symbols.len() % nd != 0 || rx_symbols.len() / nd != tx_indices.len() {
        return Err(GmiError::DimensionMismatch {
            detail: format!(
                "{} rx values / {} dims vs {} tx indices",
                rx_symbols.len(),
                nd,
                tx_indices.len()
            ),
        });
    }
    if tx_indices.iter().any(|&t| t >= m) {
        return Err(GmiError::DimensionMismatch {
            detail: "tx index out of range".into(),
        });
    }
    let uniform = vec![1.0 / m as f64; m];
    let priors = priors.unwrap_or(&uniform);
    crate::types::validate_distribution(priors)?;
    if priors.len() != m {
        return Err(GmiError::DimensionMismatch {
            detail: "prior length mismatch".into(),
        });
    }
    let demap = Demapper::from_constellation(c, priors, sigma2)?;
    let n_samples = tx_indices.len();
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let accums: Vec<Accum> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK_SIZE;
            let hi = (lo + CHUNK_SIZE).min(n_samples);
            let mut a = vec![0.0; m];
            let mut acc = Accum::default();
            for i in lo..hi {
                demap.scores(&rx_symbols[i * nd..(i + 1) * nd], &mut a);
                let (g, mi) = demap.exact_losses(&a, tx_indices[i]);
                acc.push(g, mi);
            }
            acc
        })
        .collect();
    let total = accums.iter().fold(Accum::default(), Accum::merge);
    let n = n_samples as f64;
    let h = crate::shaping::entropy_bits(priors);
    let (mean_g, se) = mean_and_stderr(total.g, total.g2, n);
    let (mean_mi, _) = mean_and_stderr(total.mi, total.mi2, n);
    Ok(RateReport {
        gmi_bits_per_sym: h - mean_g,
        mi_bits_per_sym: h - mean_mi,
        stderr: se,
        n_samples,
        method: RateMethod::Exact,
    })
}
