//! Shaped-input helpers: source entropy, Maxwell–Boltzmann amplitude
//! distributions, distribution-matcher rate loss, finite-length rates.

use crate::error::GmiError;

/// Shannon entropy of a probability vector, in bits.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Maxwell–Boltzmann distribution p_a ∝ exp(−ν·a²) over the given amplitude
/// alphabet, with ν bisected so the entropy hits the target within 1e-9 bit.
pub fn mb_distribution_for_entropy(
    amplitudes: &[f64],
    target_entropy_bits: f64,
) -> Result<Vec<f64>, GmiError> {
    if amplitudes.is_empty() {
        return Err(GmiError::InvalidDistribution("empty alphabet".into()));
    }
    let max_h = (amplitudes.len() as f64).log2();
    if !(target_entropy_bits > 0.0 && target_entropy_bits < max_h) {
        return Err(GmiError::UnattainableEntropy {
            target: target_entropy_bits,
            max: max_h,
        });
    }
    let dist = |nu: f64| -> Vec<f64> {
        let scores: Vec<f64> = amplitudes.iter().map(|&a| -nu * a * a).collect();
        let smax = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = scores.iter().map(|&s| (s - smax).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter().map(|&x| x / z).collect()
    };
    // entropy is non-increasing in nu: bracket then bisect
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while entropy_bits(&dist(hi)) > target_entropy_bits {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            // entropy floor (e.g. repeated amplitudes) sits above the target
            return Err(GmiError::UnattainableEntropy {
                target: target_entropy_bits,
                max: max_h,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy_bits(&dist(mid)) > target_entropy_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(dist(0.5 * (lo + hi)))
}

/// Composition and rate loss of a constant-composition matcher at
/// blocklength n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcdmReport {
    /// Occurrence count per amplitude, summing to n.
    pub composition: Vec<usize>,
    /// Information bits per block: ⌊log2 of the multinomial coefficient⌋.
    pub k_bits: u64,
    pub n: usize,
}

impl CcdmReport {
    /// H(composition/n) − k/n, in bits per amplitude.
    pub fn rate_loss(&self) -> f64 {
        let n = self.n as f64;
        let emp: Vec<f64> = self.composition.iter().map(|&c| c as f64 / n).collect();
        (entropy_bits(&emp) - self.k_bits as f64 / n).max(0.0)
    }
}

/// Quantizes a distribution to an integer composition summing to n
/// (largest-remainder rounding; ties broken toward lower indices).
pub fn ccdm_composition(distribution: &[f64], n: usize) -> Result<Vec<usize>, GmiError> {
    if n == 0 {
        return Err(GmiError::ZeroBlocklength);
    }
    crate::types::validate_distribution(distribution)?;
    let mut comp: Vec<usize> = Vec::with_capacity(distribution.len());
    let mut rems: Vec<f64> = Vec::with_capacity(distribution.len());
    let mut assigned = 0usize;
    for &p in distribution {
        let exact = p * n as f64;
        let fl = exact.floor();
        comp.push(fl as usize);
        rems.push(exact - fl);
        assigned += fl as usize;
    }
    let mut order: Vec<usize> = (0..comp.len()).collect();
    order.sort_by(|&a, &b| rems[b].total_cmp(&rems[a]).then(a.cmp(&b)));
    for &i in order.iter().take(n - assigned) {
        comp[i] += 1;
    }
    Ok(comp)
}

/// Full matcher report: composition, block information bits, rate loss.
pub fn ccdm_report(distribution: &[f64], n: usize) -> Result<CcdmReport, GmiError> {
    let composition = ccdm_composition(distribution, n)?;
    let mut log2_multinomial = libm::lgamma((n + 1) as f64);
    for &c in &composition {
        log2_multinomial -= libm::lgamma((c + 1) as f64);
    }
    log2_multinomial /= std::f64::consts::LN_2;
    // the guard absorbs lgamma rounding when the count is a near-exact power
    let k_bits = (log2_multinomial + 1e-9).floor() as u64;
    Ok(CcdmReport {
        composition,
        k_bits,
        n,
    })
}

/// Rate loss of a constant-composition matcher, bits per amplitude.
pub fn ccdm_rate_loss(distribution: &[f64], n: usize) -> Result<f64, GmiError> {
    ccdm_report(distribution, n).map(|r| r.rate_loss())
}

/// Finite-blocklength achievable rate: gmi − n_shaped_dims·rloss.
pub fn air_n(gmi: f64, n_shaped_dims: usize, rloss: f64) -> f64 {
    gmi - n_shaped_dims as f64 * rloss
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mb_two_level() -> Vec<f64> {
        mb_distribution_for_entropy(&[1.0, 3.0], 0.75).unwrap()
    }

    #[test]
    fn mb_hits_target_entropy() {
        let p = mb_two_level();
        assert!((p[0] - 0.78549826).abs() < 1e-6);
        assert!((p[1] - 0.21450174).abs() < 1e-6);
        assert!((entropy_bits(&p) - 0.75).abs() < 1e-9);
    }

    #[test]
    fn mb_near_uniform_limit() {
        let p = mb_distribution_for_entropy(&[1.0, 3.0, 5.0, 7.0], 2.0 - 1e-9).unwrap();
        for &x in &p {
            assert!((x - 0.25).abs() < 1e-4);
        }
        assert!(mb_distribution_for_entropy(&[1.0, 3.0], 1.5).is_err());
        assert!(mb_distribution_for_entropy(&[1.0, 3.0], 0.0).is_err());
        // duplicate amplitudes put an entropy floor above low targets
        assert!(mb_distribution_for_entropy(&[1.0, 1.0], 0.3).is_err());
    }

    #[test]
    fn hand_countable_rate_loss() {
        // n=2 over two equiprobable amplitudes: composition (1,1), k=1
        let r = ccdm_report(&[0.5, 0.5], 2).unwrap();
        assert_eq!(r.composition, vec![1, 1]);
        assert_eq!(r.k_bits, 1);
        assert!((r.rate_loss() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn golden_rate_losses() {
        let p = mb_two_level();
        let want: [(usize, [usize; 2], u64, f64); 5] = [
            (16, [13, 3], 9, 0.133712260125),
            (32, [25, 7], 21, 0.101628462538),
            (64, [50, 14], 45, 0.054753462538),
            (128, [101, 27], 91, 0.032333419404),
            (256, [201, 55], 188, 0.016264944645),
        ];
        let mut prev = f64::INFINITY;
        for (n, comp, k, rl) in want {
            let r = ccdm_report(&p, n).unwrap();
            assert_eq!(r.composition, comp.to_vec(), "n={n}");
            assert_eq!(r.k_bits, k, "n={n}");
            assert!((r.rate_loss() - rl).abs() < 1e-9, "n={n}: {}", r.rate_loss());
            assert!(r.rate_loss() >= 0.0 && r.rate_loss() < prev, "n={n}");
            prev = r.rate_loss();
        }
    }

    #[test]
    fn rate_loss_edge_cases() {
        // single amplitude: nothing to encode, nothing lost
        assert_eq!(ccdm_rate_loss(&[1.0], 64).unwrap(), 0.0);
        // blocklength 1 rounds to a single-amplitude composition
        assert_eq!(ccdm_rate_loss(&mb_two_level(), 1).unwrap(), 0.0);
        assert!(matches!(
            ccdm_rate_loss(&[0.5, 0.5], 0),
            Err(GmiError::ZeroBlocklength)
        ));
        // asymptotically vanishing
        assert!(ccdm_rate_loss(&mb_two_level(), 1_000_000).unwrap() < 1e-4);
    }

    #[test]
    fn remainder_ties_prefer_lower_index() {
        let comp = ccdm_composition(&[0.25, 0.25, 0.25, 0.25], 2).unwrap();
        assert_eq!(comp, vec![1, 1, 0, 0]);
    }

    #[test]
    fn air_reduces_to_gmi_without_loss() {
        assert_eq!(air_n(5.95, 4, 0.0), 5.95);
        assert!((air_n(6.2, 4, 0.033) - (6.2 - 0.132)).abs() < 1e-12);
    }
}
