//! `optimize`: GMI ascent from an initial constellation, writing the refined
//! format plus its optimization trace.

use std::path::PathBuf;

use shape4d_constellation::{
    expand_orthant_symmetric, extract_first_orthant, seed_from_positive_orthant,
};
use shape4d_gmi::AwgnSpec;
use shape4d_optimizer::{optimize_os, optimize_unconstrained, OptimizerConfig};

use super::{fmt6, load_source, Common};
use crate::error::CliError;
use crate::report::{write_atomic, OutputFormat, Report};

#[derive(clap::Args)]
pub struct OptimizeArgs {
    /// Refine first-orthant seed coordinates, keeping the orthant symmetry.
    #[arg(long)]
    pub os: bool,

    /// Free stochastic ascent on every point coordinate.
    #[arg(long)]
    pub unconstrained: bool,

    /// Starting constellation: built-in name or file path.
    #[arg(long)]
    pub init: String,

    /// Operating SNR in dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr: f64,

    /// Monte-Carlo samples per objective evaluation.
    #[arg(long)]
    pub samples: Option<usize>,

    /// Pass / proposal budget.
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Initial coordinate step size.
    #[arg(long)]
    pub step: Option<f64>,

    /// Multiplicative step decay per pass / proposal.
    #[arg(long)]
    pub decay: Option<f64>,

    /// Mean symbol energy constraint.
    #[arg(long)]
    pub es: Option<f64>,

    /// Step size below which the search stops.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn run(args: &OptimizeArgs, common: &Common) -> Result<(), CliError> {
    if args.os == args.unconstrained {
        return Err(CliError::Usage(
            "pass exactly one of --os or --unconstrained".into(),
        ));
    }
    let mut cfg = if args.os {
        OptimizerConfig::at_snr(args.snr)
    } else {
        OptimizerConfig::unconstrained_at_snr(args.snr)
    };
    if let Some(v) = args.samples {
        cfg.mc_samples_per_eval = v;
    }
    if let Some(v) = args.iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = args.step {
        cfg.initial_step = v;
    }
    if let Some(v) = args.decay {
        cfg.step_decay = v;
    }
    if let Some(v) = args.es {
        cfg.power_constraint_es = v;
    }
    if let Some(v) = args.tol {
        cfg.convergence_tol = v;
    }
    cfg.rng_seed = common.seed;

    let init = load_source(&args.init)?.normalize(cfg.power_constraint_es)?;
    let spec = AwgnSpec::new(&init, args.snr)?;

    let (refined, trace) = if args.os {
        // Strict orthant labelings are preferred; formats whose positive
        // orthant merely holds one point per in-orthant label still seed.
        let seed = extract_first_orthant(&init)
            .or_else(|_| seed_from_positive_orthant(&init))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let (seed_out, trace) = optimize_os(&seed, &spec, &cfg)?;
        let c = expand_orthant_symmetric(&seed_out)?.normalize(cfg.power_constraint_es)?;
        (c, trace)
    } else {
        optimize_unconstrained(&init, &spec, &cfg)?
    };

    let out_path = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("optimized.4ds"));
    shape4d_constellation::save(&refined, &out_path)?;

    let trace_path = out_path.with_extension(match common.format {
        OutputFormat::Csv => "trace.csv",
        OutputFormat::Json => "trace.json",
    });
    let mut report = Report::new(&["iter", "gmi", "stderr", "step", "accepted"]);
    for row in &trace.rows {
        report.push_row(vec![
            row.iter.to_string(),
            fmt6(row.gmi),
            fmt6(row.stderr),
            fmt6(row.step),
            row.accepted.to_string(),
        ]);
    }
    report.set_meta("mode", if args.os { "os" } else { "unconstrained" });
    report.set_meta("init", args.init.clone());
    report.set_meta("snr_db", format!("{:.2}", args.snr));
    report.set_meta("clamp_events", trace.clamp_events.len().to_string());
    report.set_meta("constellation_file", out_path.display().to_string());
    report.stamp(&common.argv, common.seed, common.timestamp);
    write_atomic(&trace_path, report.render(common.format).as_bytes())?;

    let first = trace.rows.first().map_or(f64::NAN, |r| r.gmi);
    let last = trace.rows.last().map_or(f64::NAN, |r| r.gmi);
    println!(
        "wrote {} and {} ({} passes, batch GMI {:.6} -> {:.6})",
        out_path.display(),
        trace_path.display(),
        trace.rows.len(),
        first,
        last
    );
    Ok(())
}
