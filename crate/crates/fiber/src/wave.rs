//! Dual-polarization complex waveforms and symbol mapping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use shape4d_constellation::LabeledConstellation;

use crate::error::FiberError;

/// A dual-polarization complex envelope (or symbol sequence at 1 sample per
/// symbol). `|x|² + |y|²` is instantaneous power in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolWave {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

impl DualPolWave {
    pub fn new(x: Vec<Complex64>, y: Vec<Complex64>) -> Result<Self, FiberError> {
        if x.len() != y.len() {
            return Err(FiberError::LengthMismatch(format!(
                "x has {} samples, y has {}",
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![Complex64::new(0.0, 0.0); n],
            y: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Total energy Σ(|x|² + |y|²).
    pub fn energy(&self) -> f64 {
        self.x.iter().map(|v| v.norm_sqr()).sum::<f64>()
            + self.y.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Mean power per polarization, averaging the two polarizations.
    pub fn mean_power_per_pol(&self) -> f64 {
        self.energy() / (2.0 * self.len() as f64)
    }

    /// Scales both polarizations by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in self.x.iter_mut().chain(self.y.iter_mut()) {
            *v *= factor;
        }
    }
}

/// Maps 4D constellation points to dual-polarization symbols: coordinates
/// [0,1] become the x-pol complex amplitude and [2,3] the y-pol one.
pub fn symbols_to_dual_pol(
    c: &LabeledConstellation,
    indices: &[usize],
) -> Result<DualPolWave, FiberError> {
    if c.n_dims() != 4 {
        return Err(FiberError::InvalidParam(format!(
            "dual-polarization mapping needs 4 dimensions, constellation has {}",
            c.n_dims()
        )));
    }
    let m = c.num_points();
    let mut x = Vec::with_capacity(indices.len());
    let mut y = Vec::with_capacity(indices.len());
    for &i in indices {
        if i >= m {
            return Err(FiberError::InvalidParam(format!(
                "symbol index {i} out of range for {m} points"
            )));
        }
        let p = c.point(i);
        x.push(Complex64::new(p[0], p[1]));
        y.push(Complex64::new(p[2], p[3]));
    }
    DualPolWave::new(x, y)
}

/// Adds white circular Gaussian noise so a matched-filter receiver at
/// `sps` samples per symbol sees the requested 4D-symbol SNR.
pub fn add_awgn(wave: &DualPolWave, snr_db: f64, sps: usize, seed: u64) -> DualPolWave {
    let p_pol = wave.mean_power_per_pol();
    let snr_lin = 10f64.powf(snr_db / 10.0);
    // Unit-energy matched filtering leaves per-sample noise variance intact,
    // so the per-symbol noise is σ² and the per-symbol signal P·sps.
    let sigma2 = p_pol * sps as f64 / snr_lin;
    let s = (sigma2 / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = wave.clone();
    for i in 0..out.len() {
        let zr: f64 = StandardNormal.sample(&mut rng);
        let zi: f64 = StandardNormal.sample(&mut rng);
        out.x[i] += Complex64::new(s * zr, s * zi);
        let zr: f64 = StandardNormal.sample(&mut rng);
        let zi: f64 = StandardNormal.sample(&mut rng);
        out.y[i] += Complex64::new(s * zr, s * zi);
    }
    out
}
