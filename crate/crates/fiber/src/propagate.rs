//! Split-step Manakov propagation and lumped amplification.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::FiberError;
use crate::params::FiberParams;
use crate::wave::DualPolWave;

/// Planck constant, J·s.
const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// Propagates one span with the symmetric split-step Fourier method on the
/// Manakov pair: linear half-steps (dispersion + attenuation in the
/// frequency domain) bracket full nonlinear steps where both polarizations
/// rotate by γ·(8/9)·(|Ax|² + |Ay|²)·dz. Interior half-steps are merged into
/// whole ones. The span divides into equal steps no longer than the
/// configured step size.
pub fn propagate_span(
    wave: &mut DualPolWave,
    fiber: &FiberParams,
    fs_thz: f64,
) -> Result<(), FiberError> {
    fiber.validate()?;
    if !(fs_thz > 0.0) {
        return Err(FiberError::InvalidParam(format!(
            "sample rate {fs_thz} THz must be positive"
        )));
    }
    let n = wave.len();
    if n == 0 {
        return Ok(());
    }

    let n_steps = (fiber.span_length_km / fiber.step_size_km).ceil() as usize;
    let dz = fiber.span_length_km / n_steps as f64;
    let beta2 = fiber.beta2_ps2_per_km();
    // Power attenuation in nepers/km; the field decays at half that rate.
    let alpha_np = fiber.alpha_db_per_km * std::f64::consts::LN_10 / 10.0;
    let gamma_eff = fiber.gamma_per_w_km * 8.0 / 9.0;

    let freqs = crate::dsp::freq_grid_thz(n, fs_thz);
    let lin_op = |dz_km: f64| -> Vec<Complex64> {
        freqs
            .iter()
            .map(|&f| {
                let w = 2.0 * std::f64::consts::PI * f; // rad/ps
                let phase = 0.5 * beta2 * w * w * dz_km;
                Complex64::from_polar((-0.5 * alpha_np * dz_km).exp(), phase)
            })
            .collect()
    };
    let half = lin_op(0.5 * dz);
    let full = lin_op(dz);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let inv_n = 1.0 / n as f64;

    // Enter the frequency domain and take the first linear half-step.
    fft.process(&mut wave.x);
    fft.process(&mut wave.y);
    for k in 0..n {
        wave.x[k] *= half[k];
        wave.y[k] *= half[k];
    }

    for step in 0..n_steps {
        ifft.process(&mut wave.x);
        ifft.process(&mut wave.y);
        let mut energy = 0.0;
        for k in 0..n {
            wave.x[k] *= inv_n;
            wave.y[k] *= inv_n;
            let p = wave.x[k].norm_sqr() + wave.y[k].norm_sqr();
            energy += p;
            let rot = Complex64::from_polar(1.0, gamma_eff * p * dz);
            wave.x[k] *= rot;
            wave.y[k] *= rot;
        }
        if !energy.is_finite() {
            return Err(FiberError::NonFinite {
                step,
                z_km: step as f64 * dz,
            });
        }
        fft.process(&mut wave.x);
        fft.process(&mut wave.y);
        let op = if step + 1 == n_steps { &half } else { &full };
        for k in 0..n {
            wave.x[k] *= op[k];
            wave.y[k] *= op[k];
        }
    }

    ifft.process(&mut wave.x);
    ifft.process(&mut wave.y);
    for k in 0..n {
        wave.x[k] *= inv_n;
        wave.y[k] *= inv_n;
    }
    Ok(())
}

/// Flat-gain EDFA with ASE loading.
///
/// The field is scaled by √G and, for G > 1, each polarization receives
/// circular Gaussian noise of power spectral density n_sp·h·f·(G−1) where
/// n_sp = NF_lin/2 · G/(G−1) (the standard noise-figure mapping), i.e. a
/// per-sample complex variance of NF_lin/2·G·h·f·fs. Gain 0 dB is an exact
/// identity.
pub fn edfa(
    wave: &mut DualPolWave,
    gain_db: f64,
    noise_figure_db: f64,
    center_freq_thz: f64,
    fs_thz: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(), FiberError> {
    if gain_db < 0.0 {
        return Err(FiberError::InvalidParam(format!(
            "EDFA gain {gain_db} dB must be ≥ 0"
        )));
    }
    let g = 10f64.powf(gain_db / 10.0);
    wave.scale(g.sqrt());
    if g <= 1.0 {
        return Ok(());
    }
    let nf_lin = 10f64.powf(noise_figure_db / 10.0);
    let photon_j = PLANCK_J_S * center_freq_thz * 1e12;
    let psd_w_per_hz = 0.5 * nf_lin * g * photon_j;
    let sigma2 = psd_w_per_hz * fs_thz * 1e12; // complex variance per sample
    let s = (sigma2 / 2.0).sqrt();
    for k in 0..wave.len() {
        let zr: f64 = StandardNormal.sample(rng);
        let zi: f64 = StandardNormal.sample(rng);
        wave.x[k] += Complex64::new(s * zr, s * zi);
        let zr: f64 = StandardNormal.sample(rng);
        let zi: f64 = StandardNormal.sample(rng);
        wave.y[k] += Complex64::new(s * zr, s * zi);
    }
    Ok(())
}

/// Per-span ASE power spectral density per polarization, W/Hz, for a span
/// fully compensated by an EDFA of the given noise figure.
pub fn ase_psd_w_per_hz(fiber: &FiberParams, noise_figure_db: f64) -> f64 {
    let gain_db = fiber.alpha_db_per_km * fiber.span_length_km;
    let g = 10f64.powf(gain_db / 10.0);
    if g <= 1.0 {
        return 0.0;
    }
    let nf_lin = 10f64.powf(noise_figure_db / 10.0);
    0.5 * nf_lin * g * PLANCK_J_S * fiber.center_frequency_thz() * 1e12
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn span_ase_density_matches_the_standard_budget() {
        let f = FiberParams::standard_smf(); // 15.75 dB span loss
        let s = ase_psd_w_per_hz(&f, 5.0);
        assert!((s / 7.615e-18 - 1.0).abs() < 1e-3, "psd {s}");
    }

    #[test]
    fn zero_gain_is_identity() {
        let mut w = DualPolWave::zeros(64);
        w.x[3] = Complex64::new(0.5, -0.25);
        let orig = w.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        edfa(&mut w, 0.0, 5.0, 193.414, 0.167, &mut rng).unwrap();
        assert_eq!(w, orig);
    }

    #[test]
    fn negative_gain_is_rejected() {
        let mut w = DualPolWave::zeros(8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(edfa(&mut w, -1.0, 5.0, 193.414, 0.167, &mut rng).is_err());
    }

    #[test]
    fn non_finite_input_is_reported() {
        let mut f = FiberParams::standard_smf();
        f.span_length_km = 1.0;
        f.step_size_km = 0.5;
        let mut w = DualPolWave::zeros(64);
        w.x[0] = Complex64::new(f64::NAN, 0.0);
        match propagate_span(&mut w, &f, 0.1) {
            Err(FiberError::NonFinite { step: 0, .. }) => {}
            other => panic!("expected NonFinite at step 0, got {other:?}"),
        }
    }
}
