//! Subcommand implementations and the options they all share.

pub mod constellation;
pub mod fiber;
pub mod gmi_sweep;
pub mod optimize;
pub mod rate_loss;

use std::path::{Path, PathBuf};

use shape4d_constellation::{builtin, LabeledConstellation, BUILTIN_NAMES};

use crate::error::CliError;
use crate::report::{OutputFormat, Report};

/// Options every subcommand honors.
pub struct Common {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub timestamp: bool,
    pub argv: Vec<String>,
}

impl Common {
    /// Stamp shared metadata onto the report and emit it to `--out` or stdout.
    pub fn finish(&self, mut report: Report) -> Result<(), CliError> {
        report.stamp(&self.argv, self.seed, self.timestamp);
        report.emit(self.format, self.out.as_deref())
    }
}

/// Resolve a format argument: built-in name first, then a file path.
pub fn load_source(source: &str) -> Result<LabeledConstellation, CliError> {
    if BUILTIN_NAMES.contains(&source) {
        return Ok(builtin(source)?);
    }
    if Path::new(source).exists() {
        return Ok(shape4d_constellation::load(Path::new(source))?);
    }
    Err(CliError::Usage(format!(
        "`{source}` is not a built-in format ({}) and no such file exists",
        BUILTIN_NAMES.join(", ")
    )))
}

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}
