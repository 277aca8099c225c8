//! `constellation`: structure metrics and distance spectrum of one format.

use std::path::PathBuf;

use shape4d_metrics::{energy_profile, sed_spectrum, DEFAULT_BIN_TOL, DEFAULT_LEVEL_TOL};

use super::{fmt6, load_source, Common};
use crate::error::CliError;
use crate::report::Report;

#[derive(clap::Args)]
pub struct ConstellationArgs {
    /// Built-in format name or path to a saved constellation file.
    pub source: String,

    /// Report the scalar structure metrics (the default when no flag is given).
    #[arg(long)]
    pub metrics: bool,

    /// Report the squared-distance spectrum, one row per distinct distance.
    #[arg(long)]
    pub sed_spectrum: bool,

    /// Also save the loaded constellation to this path.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

pub fn run(args: &ConstellationArgs, common: &Common) -> Result<(), CliError> {
    let c = load_source(&args.source)?;
    if let Some(path) = &args.export {
        shape4d_constellation::save(&c, path)?;
    }

    let profile = energy_profile(&c, DEFAULT_LEVEL_TOL);
    let spectrum = sed_spectrum(&c, DEFAULT_BIN_TOL);
    let metrics: Vec<(&str, String)> = vec![
        ("n_points", c.num_points().to_string()),
        ("n_dims", c.n_dims().to_string()),
        ("bits_per_symbol", c.bits_per_symbol().to_string()),
        ("es", fmt6(c.es())),
        ("papr_db", fmt6(profile.papr_db)),
        ("energy_variance", fmt6(profile.variance)),
        ("n_energy_levels", profile.levels.len().to_string()),
        ("msed", fmt6(spectrum.msed())),
        ("msed_pairs", spectrum.msed_pairs().to_string()),
    ];

    let mut report = if args.sed_spectrum {
        let mut r = Report::new(&["sed", "total_pairs", "hd1_pairs"]);
        for bin in &spectrum.bins {
            r.push_row(vec![
                fmt6(bin.sed),
                bin.total_pairs.to_string(),
                bin.hd1_pairs.to_string(),
            ]);
        }
        // With both flags the spectrum keeps the table and the scalars move
        // into the metadata block.
        if args.metrics {
            for (k, v) in &metrics {
                r.set_meta(k, v.clone());
            }
        }
        r
    } else {
        let mut r = Report::new(&["metric", "value"]);
        for (k, v) in metrics {
            r.push_row(vec![k.to_string(), v]);
        }
        r
    };
    report.set_meta("source", args.source.clone());
    common.finish(report)
}
