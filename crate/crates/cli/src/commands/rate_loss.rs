//! `rate-loss`: CCDM compositions, rate loss, and finite-length net rates
//! for probabilistically shaped PM-16QAM.

use shape4d_constellation::LabeledConstellation;
use shape4d_gmi::{air_n, ccdm_report, entropy_bits, gmi_mc, mb_distribution_for_entropy, AwgnSpec};

use super::{fmt6, load_source, Common};
use crate::error::CliError;
use crate::report::Report;

#[derive(clap::Args)]
pub struct RateLossArgs {
    /// Target source entropy in bits per 4D symbol, signs included.
    #[arg(long)]
    pub entropy: Option<f64>,

    /// Explicit amplitude probabilities, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub distribution: Option<Vec<f64>>,

    /// Amplitude alphabet, one entry per probability (default 1,3).
    #[arg(long, value_delimiter = ',')]
    pub amplitudes: Option<Vec<f64>>,

    /// CCDM blocklengths, in amplitudes per block.
    #[arg(long, value_delimiter = ',', required = true)]
    pub blocklengths: Vec<usize>,

    /// Also report net rates of shaped PM-16QAM at this SNR (dB).
    #[arg(long)]
    pub snr: Option<f64>,

    /// Monte-Carlo samples for the shaped GMI.
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
}

/// Per-symbol priors for a product of sign-symmetric shaped dimensions: the
/// distribution's amplitudes are rank-matched to the constellation's
/// per-coordinate magnitude levels, and each amplitude's mass splits evenly
/// over its two signs.
fn product_priors(
    c: &LabeledConstellation,
    amplitudes: &[f64],
    dist: &[f64],
) -> Result<Vec<f64>, CliError> {
    let mut mags: Vec<f64> = c.points_flat().iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    mags.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if mags.len() != dist.len() {
        return Err(CliError::Usage(format!(
            "constellation has {} coordinate magnitude levels but the \
             distribution has {} amplitudes",
            mags.len(),
            dist.len()
        )));
    }
    let mut order: Vec<usize> = (0..amplitudes.len()).collect();
    order.sort_by(|&i, &j| amplitudes[i].total_cmp(&amplitudes[j]));

    let prob_of = |x: f64| -> Result<f64, CliError> {
        let rank = mags
            .iter()
            .position(|&m| (m - x.abs()).abs() < 1e-9)
            .ok_or_else(|| {
                CliError::Usage(format!("coordinate |{x}| off the magnitude grid"))
            })?;
        Ok(dist[order[rank]] / 2.0) // half the amplitude mass per sign
    };
    (0..c.num_points())
        .map(|i| c.point(i).iter().map(|&x| prob_of(x)).product())
        .collect()
}

pub fn run(args: &RateLossArgs, common: &Common) -> Result<(), CliError> {
    let amplitudes = args.amplitudes.clone().unwrap_or_else(|| vec![1.0, 3.0]);
    let dist = match (&args.entropy, &args.distribution) {
        (Some(h4), None) => {
            // Four uniform sign bits leave (H4/4 − 1) bits per amplitude.
            let h_amp = h4 / 4.0 - 1.0;
            if !(0.0..=1.0 + 1e-12).contains(&h_amp) && amplitudes.len() == 2 {
                return Err(CliError::Usage(format!(
                    "entropy {h4} bit/4D needs a per-amplitude entropy of \
                     {h_amp:.4} bit, outside what two amplitudes can carry"
                )));
            }
            mb_distribution_for_entropy(&amplitudes, h_amp)?
        }
        (None, Some(p)) => {
            if p.len() != amplitudes.len() {
                return Err(CliError::Usage(format!(
                    "{} probabilities for {} amplitudes",
                    p.len(),
                    amplitudes.len()
                )));
            }
            p.clone()
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --entropy or --distribution".into(),
            ))
        }
    };

    // The asymptotic shaped GMI does not depend on the blocklength, so it is
    // estimated once and each row subtracts its own finite-length penalty.
    let shaped_gmi = match args.snr {
        Some(snr) => {
            let c = load_source("pm-16qam")?;
            let priors = product_priors(&c, &amplitudes, &dist)?;
            let spec = AwgnSpec::with_distribution(&c, snr, priors)?;
            Some(gmi_mc(&c, &spec, args.samples, common.seed)?.gmi_bits_per_sym)
        }
        None => None,
    };

    let mut columns = vec!["n", "composition", "k_bits", "rate_loss_bits_per_amp"];
    if shaped_gmi.is_some() {
        columns.push("air_n_bits");
    }
    let mut report = Report::new(&columns);
    for &n in &args.blocklengths {
        let rep = ccdm_report(&dist, n)?;
        let mut row = vec![
            n.to_string(),
            rep.composition
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            rep.k_bits.to_string(),
            format!("{:.9}", rep.rate_loss()),
        ];
        if let Some(g) = shaped_gmi {
            row.push(fmt6(air_n(g, 4, rep.rate_loss())));
        }
        report.push_row(row);
    }

    report.set_meta("amplitude_entropy_bits", fmt6(entropy_bits(&dist)));
    report.set_meta(
        "distribution",
        dist.iter().map(|p| fmt6(*p)).collect::<Vec<_>>().join(";"),
    );
    report.set_meta(
        "amplitudes",
        amplitudes
            .iter()
            .map(|a| format!("{a}"))
            .collect::<Vec<_>>()
            .join(";"),
    );
    if let (Some(g), Some(snr)) = (shaped_gmi, args.snr) {
        report.set_meta("shaped_gmi_bits", fmt6(g));
        report.set_meta("snr_db", format!("{snr:.2}"));
        report.set_meta("gmi_samples", args.samples.to_string());
    }
    common.finish(report)
}
