//! Structural figures of merit for constellations.
//!
//! Two views: the per-symbol energy distribution ([`energy_profile`] →
//! PAPR, energy variance, distinct energy levels) and the pairwise squared
//! Euclidean distance spectrum ([`sed_spectrum`] → minimum distance, pair
//! counts, and how many minimum-distance pairs sit at Hamming distance 1).

use shape4d_constellation::LabeledConstellation;

/// Default relative tolerance for clustering energy levels.
pub const DEFAULT_LEVEL_TOL: f64 = 1e-6;

/// Default absolute tolerance for merging SED bins (at `Es = 2` scale).
pub const DEFAULT_BIN_TOL: f64 = 1e-6;

/// Per-symbol energy distribution of a constellation.
#[derive(Debug, Clone)]
pub struct EnergyProfile {
    /// `||s_i||²` for every point, in point order.
    pub symbol_energies: Vec<f64>,
    /// `10·log10(max energy / mean energy)`.
    pub papr_db: f64,
    /// Population variance of the symbol energy.
    pub variance: f64,
    /// Distinct energies (cluster means) with multiplicities, ascending.
    pub levels: Vec<(f64, usize)>,
}

/// One bin of the squared-Euclidean-distance spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SedBin {
    /// Squared distance (mean of the merged pair distances).
    pub sed: f64,
    /// Number of unordered point pairs in the bin.
    pub total_pairs: usize,
    /// Pairs whose labels differ in exactly one bit.
    pub hd1_pairs: usize,
}

/// Full pairwise SED spectrum, bins ascending.
#[derive(Debug, Clone)]
pub struct SedSpectrum {
    pub bins: Vec<SedBin>,
}

impl SedSpectrum {
    /// Minimum squared distance `d²`.
    pub fn msed(&self) -> f64 {
        self.bins[0].sed
    }

    /// Number of minimum-distance pairs `n_d`.
    pub fn msed_pairs(&self) -> usize {
        self.bins[0].total_pairs
    }

    /// Total pair count across bins (`M(M−1)/2`).
    pub fn total_pairs(&self) -> usize {
        self.bins.iter().map(|b| b.total_pairs).sum()
    }

    /// Re-bins the exact spectrum into coarse display bins of the given
    /// width (e.g. 0.05 for histogram plots). Bin value = bin start.
    pub fn coarse_bins(&self, width: f64) -> Vec<SedBin> {
        let mut out: Vec<SedBin> = Vec::new();
        for b in &self.bins {
            let start = (b.sed / width).floor() * width;
            match out.last_mut() {
                Some(last) if (last.sed - start).abs() < width * 0.5 => {
                    last.total_pairs += b.total_pairs;
                    last.hd1_pairs += b.hd1_pairs;
                }
                _ => out.push(SedBin {
                    sed: start,
                    total_pairs: b.total_pairs,
                    hd1_pairs: b.hd1_pairs,
                }),
            }
        }
        out
    }
}

/// Computes the energy profile, clustering levels within `level_tol`
/// (relative to the mean energy).
pub fn energy_profile(c: &LabeledConstellation, level_tol: f64) -> EnergyProfile {
    let m = c.num_points();
    let energies: Vec<f64> = (0..m)
        .map(|i| c.point(i).iter().map(|x| x * x).sum())
        .collect();
    let mean = energies.iter().sum::<f64>() / m as f64;
    let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let variance = energies.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / m as f64;

    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    let tol = level_tol * mean;
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut anchor = sorted[0];
    let mut sum = 0.0;
    let mut count = 0usize;
    for &e in &sorted {
        if e - anchor > tol {
            levels.push((sum / count as f64, count));
            anchor = e;
            sum = 0.0;
            count = 0;
        }
        sum += e;
        count += 1;
    }
    levels.push((sum / count as f64, count));

    EnergyProfile {
        symbol_energies: energies,
        papr_db: 10.0 * (max / mean).log10(),
        variance,
        levels,
    }
}

/// Computes the exact SED spectrum over all `M(M−1)/2` pairs, merging bins
/// within the absolute tolerance `bin_tol`.
pub fn sed_spectrum(c: &LabeledConstellation, bin_tol: f64) -> SedSpectrum {
    let m = c.num_points();
    let n = c.n_dims();
    let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        let pi = c.point(i);
        let li = c.label_index(i);
        for j in (i + 1)..m {
            let pj = c.point(j);
            let mut d2 = 0.0;
            for k in 0..n {
                let d = pi[k] - pj[k];
                d2 += d * d;
            }
            let hd1 = (li ^ c.label_index(j)).count_ones() == 1;
            pairs.push((d2, hd1));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut bins: Vec<SedBin> = Vec::new();
    let mut anchor = pairs[0].0;
    let mut sum = 0.0;
    let mut total = 0usize;
    let mut hd1 = 0usize;
    for &(d2, is_hd1) in &pairs {
        if d2 - anchor > bin_tol {
            bins.push(SedBin {
                sed: sum / total as f64,
                total_pairs: total,
                hd1_pairs: hd1,
            });
            anchor = d2;
            sum = 0.0;
            total = 0;
            hd1 = 0;
        }
        sum += d2;
        total += 1;
        hd1 += usize::from(is_hd1);
    }
    bins.push(SedBin {
        sed: sum / total as f64,
        total_pairs: total,
        hd1_pairs: hd1,
    });
    SedSpectrum { bins }
}
