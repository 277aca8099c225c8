//! `fiber-sweep`: center-channel effective SNR and GMI over launch power or
//! distance for a WDM split-step link.

use std::path::PathBuf;

use serde::Deserialize;
use shape4d_fiber::{run_link, FiberParams, FormatAssignment, LinkConfig};

use super::{fmt6, load_source, Common};
use crate::error::CliError;
use crate::range::parse_range;
use crate::report::Report;

#[derive(clap::Args)]
pub struct FiberSweepArgs {
    /// JSON file overriding fiber, link, and format defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Per-channel launch power grid in dBm: `start:stop:step` or one value.
    #[arg(long, allow_hyphen_values = true)]
    pub power: Option<String>,

    /// Link length grid in km, rounded to whole spans.
    #[arg(long, allow_hyphen_values = true)]
    pub distance: Option<String>,
}

/// Optional overrides layered onto standard single-mode fiber.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FiberOverride {
    alpha_db_per_km: Option<f64>,
    dispersion_ps_per_nm_km: Option<f64>,
    gamma_per_w_km: Option<f64>,
    span_length_km: Option<f64>,
    step_size_km: Option<f64>,
    carrier_wavelength_nm: Option<f64>,
}

/// Optional overrides layered onto the desk-scale link layout.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LinkOverride {
    n_channels: Option<usize>,
    symbol_rate_gbd: Option<f64>,
    channel_spacing_ghz: Option<f64>,
    rrc_rolloff: Option<f64>,
    n_spans: Option<usize>,
    launch_power_per_channel_dbm: Option<f64>,
    edfa_noise_figure_db: Option<f64>,
    samples_per_symbol: Option<usize>,
    n_symbols_per_channel: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SweepConfigFile {
    fiber: FiberOverride,
    link: LinkOverride,
    /// Modulation on every channel (built-in name or file path).
    format: Option<String>,
}

fn apply(cfg: &SweepConfigFile, fiber: &mut FiberParams, link: &mut LinkConfig) {
    let f = &cfg.fiber;
    if let Some(v) = f.alpha_db_per_km {
        fiber.alpha_db_per_km = v;
    }
    if let Some(v) = f.dispersion_ps_per_nm_km {
        fiber.dispersion_ps_per_nm_km = v;
    }
    if let Some(v) = f.gamma_per_w_km {
        fiber.gamma_per_w_km = v;
    }
    if let Some(v) = f.span_length_km {
        fiber.span_length_km = v;
    }
    if let Some(v) = f.step_size_km {
        fiber.step_size_km = v;
    }
    if let Some(v) = f.carrier_wavelength_nm {
        fiber.carrier_wavelength_nm = v;
    }
    let l = &cfg.link;
    if let Some(v) = l.n_channels {
        link.n_channels = v;
    }
    if let Some(v) = l.symbol_rate_gbd {
        link.symbol_rate_gbd = v;
    }
    if let Some(v) = l.channel_spacing_ghz {
        link.channel_spacing_ghz = v;
    }
    if let Some(v) = l.rrc_rolloff {
        link.rrc_rolloff = v;
    }
    if let Some(v) = l.n_spans {
        link.n_spans = v;
    }
    if let Some(v) = l.launch_power_per_channel_dbm {
        link.launch_power_per_channel_dbm = v;
    }
    if let Some(v) = l.edfa_noise_figure_db {
        link.edfa_noise_figure_db = v;
    }
    if let Some(v) = l.samples_per_symbol {
        link.samples_per_symbol = v;
    }
    if let Some(v) = l.n_symbols_per_channel {
        link.n_symbols_per_channel = v;
    }
}

pub fn run(args: &FiberSweepArgs, common: &Common) -> Result<(), CliError> {
    let cfg: SweepConfigFile = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Usage(format!("config {}: {e}", path.display()))
            })?
        }
        None => SweepConfigFile::default(),
    };
    let mut fiber = FiberParams::standard_smf();
    let mut link = LinkConfig::desk_scale(0.0);
    apply(&cfg, &mut fiber, &mut link);
    link.rng_seed = common.seed;

    let format_name = cfg.format.clone().unwrap_or_else(|| "4d-os128".to_string());
    let c = load_source(&format_name)?;
    let formats: Vec<FormatAssignment> = (0..link.n_channels)
        .map(|_| FormatAssignment::new(&format_name, c.clone()))
        .collect();

    // A sweep point is one launch power and one span count.
    let points: Vec<(f64, usize)> = match (&args.power, &args.distance) {
        (Some(p), None) => parse_range(p)?
            .into_iter()
            .map(|dbm| (dbm, link.n_spans))
            .collect(),
        (None, Some(d)) => parse_range(d)?
            .into_iter()
            .map(|km| {
                let spans = (km / fiber.span_length_km).round().max(1.0) as usize;
                (link.launch_power_per_channel_dbm, spans)
            })
            .collect(),
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --power or --distance".into(),
            ))
        }
    };

    let mut report = Report::new(&[
        "launch_dbm",
        "distance_km",
        "channel",
        "eff_snr_db",
        "gmi",
        "format",
    ]);
    for &(dbm, spans) in &points {
        let mut run_cfg = link.clone();
        run_cfg.launch_power_per_channel_dbm = dbm;
        run_cfg.n_spans = spans;
        let result = run_link(&run_cfg, &fiber, &formats)?;
        let ch = run_cfg.center_channel();
        let outcome = &result.channels[ch];
        report.push_row(vec![
            format!("{dbm:.1}"),
            format!("{:.1}", spans as f64 * fiber.span_length_km),
            ch.to_string(),
            format!("{:.4}", outcome.eff_snr_db),
            fmt6(outcome.gmi),
            outcome.format.clone(),
        ]);
    }
    report.set_meta("format", format_name);
    report.set_meta("n_channels", link.n_channels.to_string());
    report.set_meta("n_symbols_per_channel", link.n_symbols_per_channel.to_string());
    report.set_meta("step_size_km", format!("{}", fiber.step_size_km));
    common.finish(report)
}
