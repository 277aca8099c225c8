//! Bit-metric demapping: per-bit log-likelihood ratios and per-sample
//! rate-loss terms.

use shape4d_constellation::LabeledConstellation;

use crate::error::GmiError;
use crate::types::{AwgnSpec, LlrMethod};

/// LLR magnitude clamp, natural-log units. Beyond this the contribution to
/// any rate estimate is below 1e-15 bit.
pub const LLR_CLAMP: f64 = 50.0;

/// Symbols whose posterior score falls this far (nats) below the maximum are
/// dropped from exponential sums; relative truncation error < 1e-17.
const SKIP_THRESHOLD: f64 = -45.0;

const MAX_BITS: usize = 16;
const INV_LN2: f64 = 1.0 / std::f64::consts::LN_2;

/// Per-bit LLRs for a block of received symbols, with the bits actually sent.
#[derive(Debug, Clone)]
pub struct LlrBatch {
    /// n × bits, row-major; natural-log base, clamped to ±[`LLR_CLAMP`].
    pub llrs: Vec<f64>,
    /// n × bits, row-major.
    pub tx_bits: Vec<u8>,
    pub bits: usize,
    pub method: LlrMethod,
}

/// Precomputed scorer for one (constellation, prior, noise variance) triple.
pub(crate) struct Demapper {
    points: Vec<f64>,
    label_idx: Vec<u32>,
    ln_priors: Vec<f64>,
    pub n_dims: usize,
    pub bits: usize,
    inv_two_sigma2: f64,
}

impl Demapper {
    pub fn from_constellation(
        c: &LabeledConstellation,
        priors: &[f64],
        sigma2: f64,
    ) -> Result<Self, GmiError> {
        let m = c.num_points();
        let label_idx = (0..m).map(|i| c.label_index(i) as u32).collect();
        Self::from_parts(
            c.points_flat().to_vec(),
            c.n_dims(),
            label_idx,
            c.bits_per_symbol(),
            priors,
            sigma2,
        )
    }

    pub fn from_parts(
        points: Vec<f64>,
        n_dims: usize,
        label_idx: Vec<u32>,
        bits: usize,
        priors: &[f64],
        sigma2: f64,
    ) -> Result<Self, GmiError> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(GmiError::ZeroNoiseVariance {
                snr_db: f64::NAN,
                sigma2,
            });
        }
        assert!(bits <= MAX_BITS, "label width {bits} exceeds {MAX_BITS}");
        assert_eq!(points.len(), label_idx.len() * n_dims);
        assert_eq!(priors.len(), label_idx.len());
        let ln_priors = priors.iter().map(|&p| p.ln()).collect();
        Ok(Self {
            points,
            label_idx,
            ln_priors,
            n_dims,
            bits,
            inv_two_sigma2: 0.5 / sigma2,
        })
    }

    /// Posterior scores a_j = ln P_j − ||y−x_j||²/(2σ²) for one received symbol.
    pub fn scores(&self, y: &[f64], a: &mut [f64]) {
        let nd = self.n_dims;
        for (j, aj) in a.iter_mut().enumerate() {
            let x = &self.points[j * nd..(j + 1) * nd];
            let mut d2 = 0.0;
            for d in 0..nd {
                let diff = y[d] - x[d];
                d2 += diff * diff;
            }
            *aj = self.ln_priors[j] - d2 * self.inv_two_sigma2;
        }
    }

    /// Exact per-sample losses, in bits: (bit-metric loss Σ_k log2(T/S_k),
    /// symbol-wise loss −log2 p(x_t|y)).
    pub fn exact_losses(&self, a: &[f64], t: usize) -> (f64, f64) {
        let bits = self.bits;
        let mut amax = f64::NEG_INFINITY;
        for &v in a {
            if v > amax {
                amax = v;
            }
        }
        let lt = self.label_idx[t];
        let mut s_tx = [0.0f64; MAX_BITS];
        let mut total = 0.0;
        let mut et = 0.0;
        for (j, &aj) in a.iter().enumerate() {
            let e = aj - amax;
            if e < SKIP_THRESHOLD && j != t {
                continue;
            }
            let w = e.exp();
            if j == t {
                et = e;
            }
            total += w;
            let agree = !(self.label_idx[j] ^ lt);
            for (k, s) in s_tx.iter_mut().enumerate().take(bits) {
                *s += w * (((agree >> k) & 1) as f64);
            }
        }
        let ln_total = total.ln();
        let mi_loss = (ln_total - et) * INV_LN2;
        let mut prod = s_tx[0];
        for &s in s_tx.iter().take(bits).skip(1) {
            prod *= s;
        }
        let gmi_loss = if prod > 1e-280 {
            (bits as f64 * ln_total - prod.ln()) * INV_LN2
        } else {
            // some side-sum underflowed; fall back to per-bit logs, bounding
            // each term by the symbol-wise loss (S_k ≥ w_t always)
            let mut sum = 0.0;
            for &s in s_tx.iter().take(bits) {
                let loss = if s > 0.0 {
                    (ln_total - s.ln()) * INV_LN2
                } else {
                    mi_loss
                };
                sum += loss.min(mi_loss);
            }
            sum
        };
        (gmi_loss, mi_loss)
    }

    /// Max-log bit-metric loss at metric scale `scale`, plus the exact
    /// symbol-wise loss, in bits.
    pub fn maxlog_losses(&self, a: &[f64], t: usize, scale: f64) -> (f64, f64) {
        let bits = self.bits;
        let mut max0 = [f64::NEG_INFINITY; MAX_BITS];
        let mut max1 = [f64::NEG_INFINITY; MAX_BITS];
        let mut amax = f64::NEG_INFINITY;
        for (j, &aj) in a.iter().enumerate() {
            if aj > amax {
                amax = aj;
            }
            let l = self.label_idx[j];
            for k in 0..bits {
                if (l >> k) & 1 == 1 {
                    if aj > max1[k] {
                        max1[k] = aj;
                    }
                } else if aj > max0[k] {
                    max0[k] = aj;
                }
            }
        }
        let mut total = 0.0;
        let mut et = 0.0;
        for (j, &aj) in a.iter().enumerate() {
            let e = aj - amax;
            if e < SKIP_THRESHOLD && j != t {
                continue;
            }
            total += e.exp();
            if j == t {
                et = e;
            }
        }
        let lt = self.label_idx[t];
        let mut gmi_loss = 0.0;
        for k in 0..bits {
            let lam = (max0[k] - max1[k]).clamp(-LLR_CLAMP, LLR_CLAMP);
            let s = if (lt >> k) & 1 == 0 { 1.0 } else { -1.0 };
            gmi_loss += log1pexp(-scale * s * lam) * INV_LN2;
        }
        (gmi_loss, (total.ln() - et) * INV_LN2)
    }

    /// Per-bit LLRs λ_k = ln(side0/side1) for one received symbol.
    pub fn llrs_into(&self, a: &[f64], method: LlrMethod, out: &mut [f64]) {
        let bits = self.bits;
        let mut max0 = [f64::NEG_INFINITY; MAX_BITS];
        let mut max1 = [f64::NEG_INFINITY; MAX_BITS];
        for (j, &aj) in a.iter().enumerate() {
            let l = self.label_idx[j];
            for k in 0..bits {
                if (l >> k) & 1 == 1 {
                    if aj > max1[k] {
                        max1[k] = aj;
                    }
                } else if aj > max0[k] {
                    max0[k] = aj;
                }
            }
        }
        match method {
            LlrMethod::MaxLog => {
                for k in 0..bits {
                    out[k] = (max0[k] - max1[k]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
            }
            LlrMethod::Exact => {
                let mut sum0 = [0.0f64; MAX_BITS];
                let mut sum1 = [0.0f64; MAX_BITS];
                for (j, &aj) in a.iter().enumerate() {
                    let l = self.label_idx[j];
                    for k in 0..bits {
                        if (l >> k) & 1 == 1 {
                            sum1[k] += (aj - max1[k]).exp();
                        } else {
                            sum0[k] += (aj - max0[k]).exp();
                        }
                    }
                }
                for k in 0..bits {
                    let lse0 = max0[k] + sum0[k].ln();
                    let lse1 = max1[k] + sum1[k].ln();
                    out[k] = (lse0 - lse1).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
            }
        }
    }

    pub fn tx_bit(&self, t: usize, k: usize) -> u8 {
        ((self.label_idx[t] >> k) & 1) as u8
    }
}

/// Numerically stable ln(1 + e^u).
pub(crate) fn log1pexp(u: f64) -> f64 {
    if u > 33.0 {
        u
    } else {
        u.exp().ln_1p()
    }
}

/// Computes per-bit LLRs (and the transmitted bits) for a block of received
/// symbols under the given channel spec.
pub fn awgn_llrs(
    c: &LabeledConstellation,
    spec: &AwgnSpec,
    rx_symbols: &[f64],
    tx_indices: &[usize],
    method: LlrMethod,
) -> Result<LlrBatch, GmiError> {
    let nd = c.n_dims();
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
    if let Some(&t) = tx_indices.iter().find(|&&t| t >= c.num_points()) {
        return Err(GmiError::DimensionMismatch {
            detail: format!("tx index {t} out of range"),
        });
    }
    let demap = Demapper::from_constellation(
        c,
        &spec.input_distribution,
        spec.noise_variance_per_real_dim,
    )?;
    let bits = c.bits_per_symbol();
    let n = tx_indices.len();
    let mut llrs = vec![0.0; n * bits];
    let mut tx_bits = vec![0u8; n * bits];
    let mut a = vec![0.0; c.num_points()];
    for (i, &t) in tx_indices.iter().enumerate() {
        demap.scores(&rx_symbols[i * nd..(i + 1) * nd], &mut a);
        demap.llrs_into(&a, method, &mut llrs[i * bits..(i + 1) * bits]);
        for k in 0..bits {
            tx_bits[i * bits + k] = demap.tx_bit(t, k);
        }
    }
    Ok(LlrBatch {
        llrs,
        tx_bits,
        bits,
        method,
    })
}
