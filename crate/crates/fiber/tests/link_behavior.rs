//! Physics and receiver checks for the transmission chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use shape4d_constellation::builtin;
use shape4d_fiber::{
    add_awgn, apply_dispersion, matched_filter, propagate_span, receiver_dsp, rrc_shape, run_link,
    symbols_to_dual_pol, wdm_demux, wdm_mux, DualPolWave, FiberParams, FormatAssignment,
    LinkConfig,
};

fn random_symbols(c: &shape4d_constellation::LabeledConstellation, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..c.num_points())).collect()
}

/// Single-channel link used by several tests.
fn one_channel_link(n_sym: usize, n_spans: usize) -> LinkConfig {
    let mut link = LinkConfig::desk_scale(0.0);
    link.n_channels = 1;
    link.n_symbols_per_channel = n_sym;
    link.n_spans = n_spans;
    link
}

#[test]
fn back_to_back_chain_is_transparent() {
    // Shape → matched filter → downsample with no channel in between: the
    // cascade is Nyquist, so the symbols return with EVM well under 1 %.
    let c = builtin("pm-qpsk").unwrap();
    let idx = random_symbols(&c, 1024, 3);
    let syms = symbols_to_dual_pol(&c, &idx).unwrap();
    let wave = rrc_shape(&syms, 0.1, 4, 64).unwrap();
    let filtered = matched_filter(&wave, 0.1, 4, 64).unwrap();
    let back = shape4d_fiber::downsample(&filtered, 4);

    let mut err = 0.0;
    let mut sig = 0.0;
    for k in 0..idx.len() {
        err += (back.x[k] - syms.x[k]).norm_sqr() + (back.y[k] - syms.y[k]).norm_sqr();
        sig += syms.x[k].norm_sqr() + syms.y[k].norm_sqr();
    }
    let evm = (err / sig).sqrt();
    assert!(evm < 0.01, "EVM {evm}");
}

#[test]
fn receiver_floor_exceeds_40_db() {
    let c = builtin("4d-os128").unwrap();
    let link = one_channel_link(1024, 0);
    let fiber = FiberParams::standard_smf();
    let sps = link.resolved_sps().unwrap();
    let idx = random_symbols(&c, 1024, 7);
    let syms = symbols_to_dual_pol(&c, &idx).unwrap();
    let wave = rrc_shape(&syms, link.rrc_rolloff, sps, 64).unwrap();

    let rx = receiver_dsp(&wave, &link, &fiber, &[&c], &[idx]).unwrap();
    assert!(rx.effective_snr_db[0] > 40.0, "floor {}", rx.effective_snr_db[0]);
    assert_eq!(rx.recovered_symbols[0].len(), 1024 * 4);
    // Genie scaling leaves no systematic rotation on a clean channel.
    assert!(rx.residual_phase[0].iter().all(|p| p.abs() < 1e-3));
}

#[test]
fn awgn_channel_reproduces_the_injected_snr() {
    let c = builtin("pm-16qam").unwrap();
    let link = one_channel_link(4096, 0);
    let fiber = FiberParams::standard_smf();
    let sps = link.resolved_sps().unwrap();
    let idx = random_symbols(&c, 4096, 11);
    let syms = symbols_to_dual_pol(&c, &idx).unwrap();
    let wave = rrc_shape(&syms, link.rrc_rolloff, sps, 64).unwrap();
    let noisy = add_awgn(&wave, 15.0, sps, 21);

    let rx = receiver_dsp(&noisy, &link, &fiber, &[&c], &[idx]).unwrap();
    assert!(
        (rx.effective_snr_db[0] - 15.0).abs() < 0.1,
        "measured {} dB",
        rx.effective_snr_db[0]
    );
}

#[test]
fn mux_demux_round_trip_isolates_channels() {
    let link = LinkConfig::desk_scale(0.0);
    let sps = link.resolved_sps().unwrap();
    let c = builtin("pm-qpsk").unwrap();
    let idx = random_symbols(&c, 1024, 5);
    let syms = symbols_to_dual_pol(&c, &idx).unwrap();
    let center = rrc_shape(&syms, link.rrc_rolloff, sps, 64).unwrap();
    let silent = DualPolWave::zeros(center.len());

    let composite = wdm_mux(&[silent.clone(), center.clone(), silent], &link).unwrap();
    let back = wdm_demux(&composite, &link, 1).unwrap();
    let err: f64 = (0..center.len())
        .map(|k| (back.x[k] - center.x[k]).norm_sqr() + (back.y[k] - center.y[k]).norm_sqr())
        .sum();
    assert!(err / center.energy() < 1e-4, "relative error {}", err / center.energy());

    // The neighboring slot should hold almost nothing.
    let side = wdm_demux(&composite, &link, 0).unwrap();
    assert!(side.energy() / center.energy() < 1e-4);
}

#[test]
fn linear_propagation_is_pure_dispersion() {
    let mut fiber = FiberParams::standard_smf();
    fiber.gamma_per_w_km = 1e-30; // effectively zero, keeps validation happy
    fiber.alpha_db_per_km = 1e-30;
    fiber.step_size_km = 0.5;

    let link = one_channel_link(1024, 1);
    let sps = link.resolved_sps().unwrap();
    let fs = link.sample_rate_thz().unwrap();
    let c = builtin("pm-qpsk").unwrap();
    let idx = random_symbols(&c, 1024, 13);
    let syms = symbols_to_dual_pol(&c, &idx).unwrap();
    let original = rrc_shape(&syms, link.rrc_rolloff, sps, 64).unwrap();

    let mut propagated = original.clone();
    propagate_span(&mut propagated, &fiber, fs).unwrap();

    // One-shot transfer function agrees with 150 split steps…
    let mut reference = original.clone();
    apply_dispersion(
        &mut reference,
        fiber.beta2_ps2_per_km(),
        fiber.span_length_km,
        fs,
        0.0,
    );
    let diff: f64 = (0..original.len())
        .map(|k| (propagated.x[k] - reference.x[k]).norm_sqr())
        .sum();
    assert!(diff / original.energy() < 1e-18, "split-step vs transfer {diff}");

    // …and the inverse transfer function restores the input.
    apply_dispersion(
        &mut propagated,
        fiber.beta2_ps2_per_km(),
        -fiber.span_length_km,
        fs,
        0.0,
    );
    let back: f64 = (0..original.len())
        .map(|k| {
            (propagated.x[k] - original.x[k]).norm_sqr()
                + (propagated.y[k] - original.y[k]).norm_sqr()
        })
        .sum();
    assert!(back / original.energy() < 1e-18, "round trip {back}");
}

#[test]
fn cw_carrier_collects_the_manakov_spm_phase() {
    let mut fiber = FiberParams::standard_smf();
    fiber.alpha_db_per_km = 1e-30;
    let p_total: f64 = 1e-3; // 0 dBm
    let n = 512;
    let amp = (p_total / 2.0).sqrt();
    let mut wave = DualPolWave {
        x: vec![Complex64::new(amp, 0.0); n],
        y: vec![Complex64::new(amp, 0.0); n],
    };
    let input = wave.clone();
    propagate_span(&mut wave, &fiber, 0.167).unwrap();

    let phi = 8.0 / 9.0 * fiber.gamma_per_w_km * p_total * fiber.span_length_km;
    let expected = Complex64::from_polar(1.0, phi);
    for k in 0..n {
        assert!((wave.x[k] - input.x[k] * expected).norm() < 1e-9);
        assert!((wave.y[k] - input.y[k] * expected).norm() < 1e-9);
    }
    assert!((wave.energy() / input.energy() - 1.0).abs() < 1e-12);
}

#[test]
fn lossless_nonlinear_propagation_conserves_energy() {
    let mut fiber = FiberParams::standard_smf();
    fiber.alpha_db_per_km = 1e-30;
    fiber.step_size_km = 0.25;

    let link = LinkConfig::desk_scale(3.0);
    let sps = link.resolved_sps().unwrap();
    let fs = link.sample_rate_thz().unwrap();
    let c = builtin("pm-16qam").unwrap();
    let mut channels = Vec::new();
    for ch in 0..3 {
        let idx = random_symbols(&c, 1024, 100 + ch);
        let syms = symbols_to_dual_pol(&c, &idx).unwrap();
        let mut w = rrc_shape(&syms, link.rrc_rolloff, sps, 64).unwrap();
        let p = w.mean_power_per_pol();
        w.scale((1e-3 / p).sqrt()); // launch ~3 dBm total
        channels.push(w);
    }
    let mut composite = wdm_mux(&channels, &link).unwrap();
    let e_in = composite.energy();
    propagate_span(&mut composite, &fiber, fs).unwrap();
    let e_out = composite.energy();
    assert!(
        (e_out / e_in - 1.0).abs() < 1e-6,
        "energy ratio {}",
        e_out / e_in
    );
}

#[test]
fn linear_ase_budget_matches_the_closed_form() {
    // γ→0 makes each span exactly linear, so one split step per span is
    // exact and the measured SNR must equal P_pol/(k·S_ase·R_s).
    let mut fiber = FiberParams::standard_smf();
    fiber.gamma_per_w_km = 1e-30;
    fiber.step_size_km = 75.0;

    let mut link = one_channel_link(2048, 20);
    link.launch_power_per_channel_dbm = 0.0;
    let fmt = vec![FormatAssignment::new("pm-qpsk", builtin("pm-qpsk").unwrap())];
    let sweep = run_link(&link, &fiber, &fmt).unwrap();

    let p_pol = 0.5e-3;
    let s_ase = shape4d_fiber::ase_psd_w_per_hz(&fiber, link.edfa_noise_figure_db);
    let rs_hz = link.symbol_rate_gbd * 1e9;
    let analytic_db = 10.0 * (p_pol / (20.0 * s_ase * rs_hz)).log10();
    let measured = sweep.rx.effective_snr_db[0];
    assert!(
        (measured - analytic_db).abs() < 0.2,
        "measured {measured} dB vs analytic {analytic_db} dB"
    );
}

#[test]
fn linear_link_residuals_look_gaussian() {
    let mut fiber = FiberParams::standard_smf();
    fiber.gamma_per_w_km = 1e-30;
    fiber.step_size_km = 75.0;

    let mut link = one_channel_link(1 << 14, 10);
    link.launch_power_per_channel_dbm = 0.0;
    let c = builtin("pm-qpsk").unwrap();
    let fmt = vec![FormatAssignment::new("pm-qpsk", c.clone())];
    let sweep = run_link(&link, &fiber, &fmt).unwrap();

    // Pool residual components across the whole record.
    let rec = &sweep.rx.recovered_symbols[0];
    let idx = {
        let mut rng = ChaCha8Rng::seed_from_u64(link.rng_seed ^ 0x7364_6174_6140_7478);
        rng.set_stream(0);
        (0..link.n_symbols_per_channel)
            .map(|_| rng.gen_range(0..c.num_points()))
            .collect::<Vec<_>>()
    };
    let mut resid = Vec::with_capacity(rec.len());
    for (k, &t) in idx.iter().enumerate() {
        let p = c.point(t);
        for d in 0..4 {
            resid.push(rec[k * 4 + d] - p[d]);
        }
    }
    let n = resid.len() as f64;
    let mean = resid.iter().sum::<f64>() / n;
    let m2 = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let m4 = resid.iter().map(|r| (r - mean).powi(4)).sum::<f64>() / n;
    let kurtosis = m4 / (m2 * m2);
    assert!(
        (2.9..=3.1).contains(&kurtosis),
        "residual kurtosis {kurtosis}"
    );
}

#[test]
fn run_link_is_deterministic() {
    let mut fiber = FiberParams::standard_smf();
    fiber.span_length_km = 5.0;
    fiber.step_size_km = 0.5;
    let mut link = one_channel_link(1024, 2);
    link.launch_power_per_channel_dbm = 2.0;
    let fmt = vec![FormatAssignment::new("4d-os128", builtin("4d-os128").unwrap())];

    let a = run_link(&link, &fiber, &fmt).unwrap();
    let b = run_link(&link, &fiber, &fmt).unwrap();
    assert_eq!(a.rx, b.rx);
    assert_eq!(a.channels[0].eff_snr_db.to_bits(), b.channels[0].eff_snr_db.to_bits());
    assert_eq!(a.channels[0].gmi.to_bits(), b.channels[0].gmi.to_bits());
}

#[test]
fn undersized_blocks_are_rejected() {
    let mut link = one_channel_link(512, 0);
    link.n_symbols_per_channel = 512;
    let fiber = FiberParams::standard_smf();
    let fmt = vec![FormatAssignment::new("pm-qpsk", builtin("pm-qpsk").unwrap())];
    assert!(matches!(
        run_link(&link, &fiber, &fmt),
        Err(shape4d_fiber::FiberError::BlockMismatch { .. })
    ));
}
