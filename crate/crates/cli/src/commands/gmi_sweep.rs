//! `gmi-sweep`: GMI/MI versus SNR for one or more formats.

use rayon::prelude::*;
use shape4d_gmi::{gmi_mc_method, AwgnSpec, GmiError, LlrMethod, RateReport};

use super::{fmt6, load_source, Common};
use crate::error::CliError;
use crate::range::parse_range;
use crate::report::Report;

#[derive(clap::Args)]
pub struct GmiSweepArgs {
    /// Comma-separated built-in names or file paths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub formats: Vec<String>,

    /// SNR grid in dB: `start:stop:step` or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: String,

    /// Monte-Carlo samples per grid point.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    /// Score with max-log LLRs instead of exact ones.
    #[arg(long)]
    pub maxlog: bool,
}

pub fn run(args: &GmiSweepArgs, common: &Common) -> Result<(), CliError> {
    let snrs = parse_range(&args.snr)?;
    let sources: Vec<_> = args
        .formats
        .iter()
        .map(|s| load_source(s).map(|c| (s.clone(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    let method = if args.maxlog {
        LlrMethod::MaxLog
    } else {
        LlrMethod::Exact
    };

    let grid: Vec<(usize, f64)> = (0..sources.len())
        .flat_map(|i| snrs.iter().map(move |&snr| (i, snr)))
        .collect();

    // One seed across the whole grid: formats at the same SNR share noise
    // draws, so curve differences are low-variance.
    let results = grid
        .par_iter()
        .map(|&(i, snr)| {
            let spec = AwgnSpec::new(&sources[i].1, snr)?;
            gmi_mc_method(&sources[i].1, &spec, args.samples, common.seed, method)
        })
        .collect::<Result<Vec<RateReport>, GmiError>>()?;

    let mut report = Report::new(&[
        "format",
        "snr_db",
        "gmi",
        "mi",
        "stderr",
        "n_samples",
        "method",
    ]);
    for (&(i, snr), r) in grid.iter().zip(&results) {
        report.push_row(vec![
            sources[i].0.clone(),
            format!("{snr:.2}"),
            fmt6(r.gmi_bits_per_sym),
            fmt6(r.mi_bits_per_sym),
            fmt6(r.stderr),
            r.n_samples.to_string(),
            r.method.as_str().to_string(),
        ]);
    }
    common.finish(report)
}
