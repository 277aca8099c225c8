//! Pulse shaping, WDM (de)multiplexing, and linear transforms.
//!
//! All convolutions are cyclic with zero-delay tap layout, so symbol k of a
//! shaped waveform stays at sample k·sps through the whole chain and no
//! group-delay bookkeeping is needed.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::FiberError;
use crate::params::LinkConfig;
use crate::wave::DualPolWave;

/// Shortest admissible RRC filter span, in symbols.
pub const MIN_FILTER_SPAN: usize = 16;

/// Root-raised-cosine taps at `sps` samples per symbol spanning
/// `span_symbols`, normalized to unit energy. Index k holds the tap at time
/// (k − span·sps/2)/sps symbols.
fn rrc_taps(rolloff: f64, sps: usize, span_symbols: usize) -> Vec<f64> {
    let half = (span_symbols * sps) / 2;
    let mut taps = Vec::with_capacity(2 * half + 1);
    for k in 0..=(2 * half) {
        let tau = (k as f64 - half as f64) / sps as f64;
        taps.push(rrc_value(tau, rolloff));
    }
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let inv = 1.0 / energy.sqrt();
    for t in taps.iter_mut() {
        *t *= inv;
    }
    taps
}

/// RRC impulse response at `tau` symbol periods, unnormalized.
fn rrc_value(tau: f64, beta: f64) -> f64 {
    use std::f64::consts::PI;
    if tau.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    let quarter = 1.0 / (4.0 * beta);
    if (tau.abs() - quarter).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return (beta / std::f64::consts::SQRT_2)
            * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let denom = PI * tau * (1.0 - (4.0 * beta * tau) * (4.0 * beta * tau));
    ((PI * tau * (1.0 - beta)).sin() + 4.0 * beta * tau * (PI * tau * (1.0 + beta)).cos()) / denom
}

fn fft_forward(buf: &mut [Complex64], planner: &mut FftPlanner<f64>) {
    planner.plan_fft_forward(buf.len()).process(buf);
}

fn fft_inverse(buf: &mut [Complex64], planner: &mut FftPlanner<f64>) {
    planner.plan_fft_inverse(buf.len()).process(buf);
    let s = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

/// Frequency response of the zero-delay RRC filter on an `n`-point grid.
pub(crate) fn rrc_response(
    n: usize,
    rolloff: f64,
    sps: usize,
    span_symbols: usize,
) -> Result<Vec<Complex64>, FiberError> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(FiberError::InvalidParam(format!(
            "rolloff {rolloff} outside (0, 1]"
        )));
    }
    if span_symbols < MIN_FILTER_SPAN {
        return Err(FiberError::FilterSpanTooShort {
            span_symbols,
            min: MIN_FILTER_SPAN,
        });
    }
    let taps = rrc_taps(rolloff, sps, span_symbols);
    if taps.len() > n {
        return Err(FiberError::InvalidParam(format!(
            "filter of {} taps exceeds the {}-sample waveform",
            taps.len(),
            n
        )));
    }
    let half = taps.len() / 2;
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for (k, &t) in taps.iter().enumerate() {
        // Center tap at index 0, wrapping negative times to the tail.
        let idx = (n + k - half) % n;
        h[idx].re += t;
    }
    let mut planner = FftPlanner::new();
    fft_forward(&mut h, &mut planner);
    Ok(h)
}

fn apply_response(wave: &mut DualPolWave, h: &[Complex64]) {
    let mut planner = FftPlanner::new();
    for pol in [&mut wave.x, &mut wave.y] {
        fft_forward(pol, &mut planner);
        for (v, r) in pol.iter_mut().zip(h.iter()) {
            *v *= r;
        }
        fft_inverse(pol, &mut planner);
    }
}

/// Upsamples dual-polarization symbols and applies the unit-energy RRC
/// shaping filter (cyclic, zero-delay: symbol k sits at sample k·sps).
pub fn rrc_shape(
    symbols: &DualPolWave,
    rolloff: f64,
    sps: usize,
    span_symbols: usize,
) -> Result<DualPolWave, FiberError> {
    if sps == 0 {
        return Err(FiberError::InvalidParam("sps must be ≥ 1".into()));
    }
    let n = symbols.len() * sps;
    let h = rrc_response(n, rolloff, sps, span_symbols)?;
    let mut wave = DualPolWave::zeros(n);
    for (k, (&sx, &sy)) in symbols.x.iter().zip(symbols.y.iter()).enumerate() {
        wave.x[k * sps] = sx;
        wave.y[k * sps] = sy;
    }
    apply_response(&mut wave, &h);
    Ok(wave)
}

/// Applies the same unit-energy RRC as a matched filter (no rate change).
pub fn matched_filter(
    wave: &DualPolWave,
    rolloff: f64,
    sps: usize,
    span_symbols: usize,
) -> Result<DualPolWave, FiberError> {
    let h = rrc_response(wave.len(), rolloff, sps, span_symbols)?;
    let mut out = wave.clone();
    apply_response(&mut out, &h);
    Ok(out)
}

/// Keeps every sps-th sample, returning the symbol-rate sequence.
pub fn downsample(wave: &DualPolWave, sps: usize) -> DualPolWave {
    let n = wave.len() / sps;
    DualPolWave {
        x: (0..n).map(|k| wave.x[k * sps]).collect(),
        y: (0..n).map(|k| wave.y[k * sps]).collect(),
    }
}

/// FFT-order baseband frequencies in THz for an `n`-point grid at `fs_thz`.
pub(crate) fn freq_grid_thz(n: usize, fs_thz: f64) -> Vec<f64> {
    let df = fs_thz / n as f64;
    (0..n)
        .map(|k| {
            if 2 * k < n {
                k as f64 * df
            } else {
                (k as f64 - n as f64) * df
            }
        })
        .collect()
}

/// Multiplies by the chromatic-dispersion transfer function
/// exp(i·(β₂/2)·(2π(f + f_offset))²·L); negative `length_km` inverts it.
pub fn apply_dispersion(
    wave: &mut DualPolWave,
    beta2_ps2_per_km: f64,
    length_km: f64,
    fs_thz: f64,
    freq_offset_thz: f64,
) {
    use std::f64::consts::PI;
    let n = wave.len();
    let freqs = freq_grid_thz(n, fs_thz);
    let phase: Vec<Complex64> = freqs
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * (f + freq_offset_thz); // rad/ps
            Complex64::from_polar(1.0, 0.5 * beta2_ps2_per_km * w * w * length_km)
        })
        .collect();
    let mut planner = FftPlanner::new();
    for pol in [&mut wave.x, &mut wave.y] {
        fft_forward(pol, &mut planner);
        for (v, p) in pol.iter_mut().zip(phase.iter()) {
            *v *= *p;
        }
        fft_inverse(pol, &mut planner);
    }
}

/// Exact integer-bin frequency shift: multiplies by exp(i·2π·bins·k/N).
pub(crate) fn shift_bins(wave: &mut DualPolWave, bins: i64) {
    use std::f64::consts::PI;
    let n = wave.len() as i64;
    if bins.rem_euclid(n) == 0 {
        return;
    }
    for k in 0..wave.len() {
        let idx = (bins * k as i64).rem_euclid(n);
        let ang = 2.0 * PI * idx as f64 / n as f64;
        let rot = Complex64::from_polar(1.0, ang);
        wave.x[k] *= rot;
        wave.y[k] *= rot;
    }
}

/// FFT bin closest to `channel`'s carrier offset on an `n`-point grid.
pub(crate) fn channel_bin(link: &LinkConfig, channel: usize, n: usize) -> Result<i64, FiberError> {
    let fs = link.sample_rate_thz()?;
    let f_thz = link.channel_offset(channel) * link.channel_spacing_ghz * 1e-3;
    Ok((f_thz / fs * n as f64).round() as i64)
}

/// Exact carrier frequency used for `channel` after bin quantization, THz.
pub(crate) fn channel_freq_thz(
    link: &LinkConfig,
    channel: usize,
    n: usize,
) -> Result<f64, FiberError> {
    let fs = link.sample_rate_thz()?;
    Ok(channel_bin(link, channel, n)? as f64 * fs / n as f64)
}

/// Superimposes per-channel baseband waveforms on the WDM grid. Carriers
/// are quantized to the nearest FFT bin so mux→demux round trips are exact.
pub fn wdm_mux(channels: &[DualPolWave], link: &LinkConfig) -> Result<DualPolWave, FiberError> {
    if channels.len() != link.n_channels {
        return Err(FiberError::InvalidParam(format!(
            "{} waveforms for {} channels",
            channels.len(),
            link.n_channels
        )));
    }
    link.resolved_sps()?;
    let n = channels[0].len();
    if channels.iter().any(|c| c.len() != n) {
        return Err(FiberError::LengthMismatch(
            "channel waveforms differ in length".into(),
        ));
    }
    let mut out = DualPolWave::zeros(n);
    for (i, ch) in channels.iter().enumerate() {
        let mut shifted = ch.clone();
        shift_bins(&mut shifted, channel_bin(link, i, n)?);
        for k in 0..n {
            out.x[k] += shifted.x[k];
            out.y[k] += shifted.y[k];
        }
    }
    Ok(out)
}

/// Selects one channel: shifts its carrier to baseband and applies a
/// brick-wall filter over the (1 + rolloff)·symbol-rate channel band.
pub fn wdm_demux(
    wave: &DualPolWave,
    link: &LinkConfig,
    channel: usize,
) -> Result<DualPolWave, FiberError> {
    if channel >= link.n_channels {
        return Err(FiberError::InvalidParam(format!(
            "channel {channel} out of range for {} channels",
            link.n_channels
        )));
    }
    let n = wave.len();
    let fs = link.sample_rate_thz()?;
    let mut out = wave.clone();
    shift_bins(&mut out, -channel_bin(link, channel, n)?);
    let half_band = 0.5 * link.symbol_rate_gbd * (1.0 + link.rrc_rolloff) * 1e-3;
    let freqs = freq_grid_thz(n, fs);
    let mut planner = FftPlanner::new();
    for pol in [&mut out.x, &mut out.y] {
        fft_forward(pol, &mut planner);
        for (v, &f) in pol.iter_mut().zip(freqs.iter()) {
            if f.abs() > half_band {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        fft_inverse(pol, &mut planner);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taps_are_unit_energy_and_nyquist() {
        for (beta, sps) in [(0.1, 4usize), (0.25, 2), (1.0, 8)] {
            let g = rrc_taps(beta, sps, 64);
            let e: f64 = g.iter().map(|t| t * t).sum();
            assert!((e - 1.0).abs() < 1e-12);

            // The shaping+matched cascade must vanish at nonzero symbol lags.
            let peak: f64 = e;
            for lag in 1..32usize {
                let d = lag * sps;
                let c: f64 = (0..g.len() - d).map(|i| g[i] * g[i + d]).sum();
                assert!(
                    c.abs() / peak < 0.01,
                    "ISI {} at lag {lag} (β={beta}, sps={sps})",
                    c / peak
                );
            }
        }
    }

    #[test]
    fn impulse_reproduces_the_tap_shape() {
        let sps = 4;
        let span = 16;
        let n_sym = 32;
        let mut syms = DualPolWave::zeros(n_sym);
        syms.x[0] = Complex64::new(1.0, 0.0);
        let wave = rrc_shape(&syms, 0.1, sps, span).unwrap();
        let taps = rrc_taps(0.1, sps, span);
        let half = taps.len() / 2;
        let n = n_sym * sps;
        for (k, &t) in taps.iter().enumerate() {
            let idx = (n + k - half) % n;
            assert!((wave.x[idx].re - t).abs() < 1e-10);
            assert!(wave.x[idx].im.abs() < 1e-10);
        }
        assert!(wave.y.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn short_spans_are_rejected()  {
        let syms = DualPolWave::zeros(64);
        assert!(matches!(
            rrc_shape(&syms, 0.1, 4, 8),
            Err(FiberError::FilterSpanTooShort { .. })
        ));
    }

    #[test]
    fn integer_bin_shift_round_trips_exactly() {
        let n = 256;
        let mut w = DualPolWave::zeros(n);
        for k in 0..n {
            w.x[k] = Complex64::new((k as f64 * 0.1).sin(), (k as f64 * 0.07).cos());
            w.y[k] = Complex64::new(0.3, -0.2) * w.x[k];
        }
        let orig = w.clone();
        shift_bins(&mut w, 37);
        shift_bins(&mut w, -37);
        for k in 0..n {
            assert!((w.x[k] - orig.x[k]).norm() < 1e-12);
            assert!((w.y[k] - orig.y[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn dispersion_is_invertible() {
        let n = 1024;
        let mut w = DualPolWave::zeros(n);
        for k in 0..n {
            w.x[k] = Complex64::new((k as f64 * 0.05).sin(), 0.0);
            w.y[k] = Complex64::new(0.0, (k as f64 * 0.03).cos());
        }
        let orig = w.clone();
        apply_dispersion(&mut w, -21.556, 750.0, 0.167, 0.0);
        let moved: f64 = (0..n).map(|k| (w.x[k] - orig.x[k]).norm_sqr()).sum();
        assert!(moved > 1.0, "dispersion should visibly distort the waveform");
        apply_dispersion(&mut w, -21.556, -750.0, 0.167, 0.0);
        for k in 0..n {
            assert!((w.x[k] - orig.x[k]).norm() < 1e-9);
            assert!((w.y[k] - orig.y[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn freq_grid_is_fft_ordered() {
        let g = freq_grid_thz(8, 8.0);
        assert_eq!(g, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }
}
