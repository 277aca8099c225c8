//! End-to-end checks of the `shape4d` binary: exit codes, report formats,
//! determinism, and the documented behavior of each subcommand.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn shape4d(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shape4d"))
        .args(args)
        .current_dir(dir)
        .env_remove("SHAPE4D_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Split a CSV report into metadata, header, and data rows.
fn parse_csv(text: &str) -> (BTreeMap<String, String>, Vec<String>, Vec<Vec<String>>) {
    let mut meta = BTreeMap::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(kv) = line.strip_prefix('#') {
            let (k, v) = kv.split_once('=').expect("metadata is key=value");
            meta.insert(k.to_string(), v.to_string());
        } else if header.is_empty() {
            header = line.split(',').map(|s| s.to_string()).collect();
        } else {
            rows.push(line.split(',').map(|s| s.to_string()).collect());
        }
    }
    (meta, header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

fn metric_value(rows: &[Vec<String>], name: &str) -> f64 {
    rows.iter()
        .find(|r| r[0] == name)
        .unwrap_or_else(|| panic!("no metric {name}"))[1]
        .parse()
        .expect("numeric metric")
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["constellation", "no-such-format"],
        &["gmi-sweep", "--formats", "pm-qpsk", "--snr", "1:2"],
        &["gmi-sweep", "--formats", "pm-qpsk", "--snr", "1:5:0"],
        &["optimize", "--init", "pm-qpsk", "--snr", "9.5"],
        &[
            "optimize",
            "--os",
            "--unconstrained",
            "--init",
            "pm-qpsk",
            "--snr",
            "9.5",
        ],
        &["fiber-sweep"],
        &["fiber-sweep", "--power", "0", "--distance", "75"],
        &["rate-loss", "--blocklengths", "32"],
        &[
            "rate-loss",
            "--entropy",
            "7",
            "--distribution",
            "0.5,0.5",
            "--blocklengths",
            "32",
        ],
        &["gmi-sweep", "--formats", "pm-qpsk", "--snr", "5", "--threads", "0"],
    ];
    for args in cases {
        let out = shape4d(args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?} should exit 2, stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let out = Command::new(env!("CARGO_BIN_EXE_shape4d"))
        .args(["gmi-sweep", "--formats", "pm-qpsk", "--snr", "5"])
        .env("SHAPE4D_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = shape4d(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_config_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"link": {"bogus_knob": 3}}"#).unwrap();
    let out = shape4d(
        &["fiber-sweep", "--config", cfg.to_str().unwrap(), "--power", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_knob"));
}

#[test]
fn reports_are_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gmi-sweep",
        "--formats",
        "pm-qpsk",
        "--snr",
        "4:6:1",
        "--samples",
        "5000",
        "--no-timestamp",
    ];
    let a = stdout_of(&shape4d(&args, dir.path()));
    let b = stdout_of(&shape4d(&args, dir.path()));
    assert_eq!(a, b);
    assert!(!a.contains("timestamp_unix_s"));

    // Without the flag a timestamp line appears.
    let with_ts = stdout_of(&shape4d(&args[..args.len() - 1], dir.path()));
    assert!(with_ts.contains("#timestamp_unix_s="));
}

#[test]
fn constellation_metrics_match_published_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &["constellation", "4d-os128", "--metrics", "--no-timestamp"],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&text);
    assert_eq!(header, ["metric", "value"]);
    assert!((metric_value(&rows, "papr_db") - 1.89).abs() < 0.02);
    assert!((metric_value(&rows, "energy_variance") - 0.797).abs() < 0.01);
    assert!((metric_value(&rows, "msed") - 0.14).abs() < 0.01);
    assert_eq!(metric_value(&rows, "msed_pairs"), 16.0);
    assert_eq!(metric_value(&rows, "n_energy_levels"), 3.0);

    let text = stdout_of(&shape4d(
        &["constellation", "pm-qpsk", "--no-timestamp"],
        dir.path(),
    ));
    let (_, _, rows) = parse_csv(&text);
    assert!(metric_value(&rows, "papr_db").abs() < 1e-9);
}

#[test]
fn constellation_files_round_trip_through_export() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("file.4ds");
    stdout_of(&shape4d(
        &[
            "constellation",
            "128sp-16qam",
            "--export",
            saved.to_str().unwrap(),
            "--no-timestamp",
        ],
        dir.path(),
    ));

    // The saved file behaves exactly like the built-in it came from.
    let text = stdout_of(&shape4d(
        &[
            "constellation",
            saved.to_str().unwrap(),
            "--sed-spectrum",
            "--metrics",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (meta, header, rows) = parse_csv(&text);
    assert_eq!(header, ["sed", "total_pairs", "hd1_pairs"]);
    let first_sed: f64 = rows[0][0].parse().unwrap();
    let first_pairs: usize = rows[0][1].parse().unwrap();
    assert!((first_sed - 0.8).abs() < 0.01);
    assert_eq!(first_pairs, 864);
    // Scalars move into the metadata block when both flags are given.
    assert_eq!(meta["n_points"], "128");
    assert_eq!(meta["msed_pairs"], "864");
}

#[test]
fn gmi_sweep_crossings_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &[
            "gmi-sweep",
            "--formats",
            "4d-os128,128sp-16qam,7b4d-2a8psk",
            "--snr",
            "9.25:10.75:0.5",
            "--samples",
            "40000",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&text);
    let (fc, sc, gc) = (
        column(&header, "format"),
        column(&header, "snr_db"),
        column(&header, "gmi"),
    );

    // SNR where the format's GMI curve crosses 5.95 bit/4D, by linear
    // interpolation between the bracketing grid points.
    let crossing = |name: &str| -> f64 {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r[fc] == name)
            .map(|r| (r[sc].parse().unwrap(), r[gc].parse().unwrap()))
            .collect();
        for w in pts.windows(2) {
            let ((s0, g0), (s1, g1)) = (w[0], w[1]);
            if g0 < 5.95 && g1 >= 5.95 {
                return s0 + (5.95 - g0) * (s1 - s0) / (g1 - g0);
            }
        }
        panic!("no 5.95 crossing for {name} in {pts:?}");
    };
    let os128 = crossing("4d-os128");
    let sp128 = crossing("128sp-16qam");
    let psk = crossing("7b4d-2a8psk");
    assert!(
        os128 < sp128 && sp128 < psk,
        "crossings out of order: os128 {os128:.3}, 128sp {sp128:.3}, 2a8psk {psk:.3}"
    );
    assert!(sp128 - os128 > 0.4, "os128 advantage too small");
}

#[test]
fn maxlog_curve_stays_near_exact() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "gmi-sweep",
        "--formats",
        "4d-os128",
        "--snr",
        "8:12:2",
        "--samples",
        "40000",
        "--no-timestamp",
    ];
    let exact = stdout_of(&shape4d(&base, dir.path()));
    let mut with_flag: Vec<&str> = base.to_vec();
    with_flag.push("--maxlog");
    let maxlog = stdout_of(&shape4d(&with_flag, dir.path()));

    let (_, header, exact_rows) = parse_csv(&exact);
    let (_, _, maxlog_rows) = parse_csv(&maxlog);
    let (gc, mc) = (column(&header, "gmi"), column(&header, "method"));
    assert!(exact_rows.iter().all(|r| r[mc] == "exact"));
    assert!(maxlog_rows.iter().all(|r| r[mc] == "maxlog"));
    for (e, m) in exact_rows.iter().zip(&maxlog_rows) {
        let ge: f64 = e[gc].parse().unwrap();
        let gm: f64 = m[gc].parse().unwrap();
        assert!(
            (ge - gm).abs() <= 0.02,
            "max-log deviates by {} at snr {}",
            (ge - gm).abs(),
            e[column(&header, "snr_db")]
        );
    }
}

#[test]
fn empty_snr_range_yields_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &[
            "gmi-sweep",
            "--formats",
            "pm-qpsk",
            "--snr",
            "12:10:1",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&text);
    assert_eq!(header[0], "format");
    assert!(rows.is_empty());
}

#[test]
fn gamma_zero_distance_sweep_tracks_ase_accumulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("linear.json");
    std::fs::write(
        &cfg,
        r#"{
            "fiber": {"gamma_per_w_km": 0.0, "step_size_km": 75.0},
            "link": {"n_symbols_per_channel": 1024},
            "format": "pm-16qam"
        }"#,
    )
    .unwrap();
    let text = stdout_of(&shape4d(
        &[
            "fiber-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--distance",
            "75:600:75",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&text);
    let (dc, ec) = (column(&header, "distance_km"), column(&header, "eff_snr_db"));
    assert_eq!(rows.len(), 8);

    // Without nonlinearity the SNR is ASE-limited: every span doubling costs
    // 3 dB, i.e. effSNR is linear in 10·log10(n_spans) with slope −1.
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let spans: f64 = r[dc].parse::<f64>().unwrap() / 75.0;
            (10.0 * spans.log10(), r[ec].parse().unwrap())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(
        (slope + 1.0).abs() < 0.1,
        "ASE slope {slope:.3} should be close to -1"
    );
}

#[test]
fn distance_sweep_gmi_is_monotone_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("linear.json");
    std::fs::write(
        &cfg,
        r#"{
            "fiber": {"gamma_per_w_km": 0.0, "step_size_km": 75.0},
            "link": {"n_symbols_per_channel": 1024}
        }"#,
    )
    .unwrap();
    let text = stdout_of(&shape4d(
        &[
            "fiber-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--distance",
            "3000:12000:3000",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (meta, header, rows) = parse_csv(&text);
    assert_eq!(meta["format"], "4d-os128");
    let gc = column(&header, "gmi");
    let gmis: Vec<f64> = rows.iter().map(|r| r[gc].parse().unwrap()).collect();
    assert_eq!(gmis.len(), 4);
    for w in gmis.windows(2) {
        assert!(
            w[1] < w[0] + 0.02,
            "GMI should not grow with distance: {gmis:?}"
        );
    }
    assert!(gmis[3] < gmis[0] - 0.3, "no visible decline: {gmis:?}");
}

#[test]
fn optimize_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "optimize",
        "--os",
        "--init",
        "4d-os128",
        "--snr",
        "9.5",
        "--samples",
        "2000",
        "--iterations",
        "2",
        "--seed",
        "7",
        "--out",
        "refined.4ds",
        "--no-timestamp",
    ];
    stdout_of(&shape4d(&args, dir.path()));
    let c1 = std::fs::read(dir.path().join("refined.4ds")).unwrap();
    let t1 = std::fs::read(dir.path().join("refined.trace.csv")).unwrap();
    stdout_of(&shape4d(&args, dir.path()));
    let c2 = std::fs::read(dir.path().join("refined.4ds")).unwrap();
    let t2 = std::fs::read(dir.path().join("refined.trace.csv")).unwrap();
    assert_eq!(c1, c2);
    assert_eq!(t1, t2);

    let (meta, header, rows) = parse_csv(std::str::from_utf8(&t1).unwrap());
    assert_eq!(header, ["iter", "gmi", "stderr", "step", "accepted"]);
    assert!(!rows.is_empty());
    assert_eq!(meta["mode"], "os");
    assert_eq!(meta["seed"], "7");

    // The refined file is a valid constellation of unchanged size and energy.
    let text = stdout_of(&shape4d(
        &[
            "constellation",
            "refined.4ds",
            "--metrics",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (_, _, rows) = parse_csv(&text);
    assert_eq!(metric_value(&rows, "n_points"), 128.0);
    assert!((metric_value(&rows, "es") - 2.0).abs() < 1e-6);
}

#[test]
fn json_report_mirrors_csv_content() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout_of(&shape4d(
        &[
            "gmi-sweep",
            "--formats",
            "pm-qpsk",
            "--snr",
            "4:5:1",
            "--samples",
            "5000",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let json = stdout_of(&shape4d(
        &[
            "gmi-sweep",
            "--formats",
            "pm-qpsk",
            "--snr",
            "4:5:1",
            "--samples",
            "5000",
            "--no-timestamp",
            "--format",
            "json",
        ],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&csv);
    let body: serde_json::Value = serde_json::from_str(&json).unwrap();
    let jcols: Vec<String> = body["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(jcols, header);
    let jrows = body["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (jr, cr) in jrows.iter().zip(&rows) {
        let jr: Vec<&str> = jr.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(jr, cr.iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(body["metadata"]["seed"], "1");
}

#[test]
fn out_flag_writes_the_report_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = shape4d(
        &[
            "constellation",
            "pm-qpsk",
            "--no-timestamp",
            "--out",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let (_, _, rows) = parse_csv(&text);
    assert!(metric_value(&rows, "papr_db").abs() < 1e-9);
}

#[test]
fn seed_flag_changes_the_noise_draws() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| -> f64 {
        let text = stdout_of(&shape4d(
            &[
                "gmi-sweep",
                "--formats",
                "pm-qpsk",
                "--snr",
                "5",
                "--samples",
                "5000",
                "--seed",
                seed,
                "--no-timestamp",
            ],
            dir.path(),
        ));
        let (_, header, rows) = parse_csv(&text);
        rows[0][column(&header, "gmi")].parse().unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert!(a != b, "different seeds should perturb the estimate");
    assert!((a - b).abs() < 0.1, "but only within Monte-Carlo noise");
}

#[test]
fn rate_loss_table_matches_the_combinatorics() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &[
            "rate-loss",
            "--entropy",
            "7",
            "--blocklengths",
            "1,32,64,128",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (meta, header, rows) = parse_csv(&text);
    assert!((meta["amplitude_entropy_bits"].parse::<f64>().unwrap() - 0.75).abs() < 1e-9);
    let (nc, cc, kc, rc) = (
        column(&header, "n"),
        column(&header, "composition"),
        column(&header, "k_bits"),
        column(&header, "rate_loss_bits_per_amp"),
    );
    let row = |n: &str| rows.iter().find(|r| r[nc] == n).unwrap();

    // Blocklength 1 sends a constant amplitude: zero bits, zero loss against
    // the (degenerate) distribution it actually uses.
    assert_eq!(row("1")[kc], "0");
    assert!(row("1")[rc].parse::<f64>().unwrap().abs() < 1e-12);

    assert_eq!(row("32")[cc], "25;7");
    assert_eq!(row("32")[kc], "21");
    assert!((row("32")[rc].parse::<f64>().unwrap() - 0.101628463).abs() < 1e-8);
    assert_eq!(row("64")[cc], "50;14");
    assert_eq!(row("64")[kc], "45");
    assert!((row("64")[rc].parse::<f64>().unwrap() - 0.054753463).abs() < 1e-8);
    assert_eq!(row("128")[cc], "101;27");
    assert_eq!(row("128")[kc], "91");
    assert!((row("128")[rc].parse::<f64>().unwrap() - 0.032333419).abs() < 1e-8);

    // Longer blocks lose less.
    let losses: Vec<f64> = ["32", "64", "128"]
        .iter()
        .map(|n| row(n)[rc].parse().unwrap())
        .collect();
    assert!(losses[0] > losses[1] && losses[1] > losses[2]);
}

#[test]
fn rate_loss_vanishes_for_uniform_long_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &[
            "rate-loss",
            "--distribution",
            "0.5,0.5",
            "--blocklengths",
            "64,512",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (_, header, rows) = parse_csv(&text);
    let rc = column(&header, "rate_loss_bits_per_amp");
    let r64: f64 = rows[0][rc].parse().unwrap();
    let r512: f64 = rows[1][rc].parse().unwrap();
    assert!(r512 < r64);
    assert!(r512 < 0.01, "uniform rate loss should fade: {r512}");
}

#[test]
fn rate_loss_air_column_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(&shape4d(
        &[
            "rate-loss",
            "--entropy",
            "7",
            "--blocklengths",
            "32,128",
            "--snr",
            "9.5",
            "--samples",
            "20000",
            "--no-timestamp",
        ],
        dir.path(),
    ));
    let (meta, header, rows) = parse_csv(&text);
    let g: f64 = meta["shaped_gmi_bits"].parse().unwrap();
    let (rc, ac) = (
        column(&header, "rate_loss_bits_per_amp"),
        column(&header, "air_n_bits"),
    );
    for r in &rows {
        let rloss: f64 = r[rc].parse().unwrap();
        let air: f64 = r[ac].parse().unwrap();
        assert!((air - (g - 4.0 * rloss)).abs() < 1e-5);
    }
    // Longer blocks keep more of the shaped rate.
    let a32: f64 = rows[0][ac].parse().unwrap();
    let a128: f64 = rows[1][ac].parse().unwrap();
    assert!(a128 > a32);
}
