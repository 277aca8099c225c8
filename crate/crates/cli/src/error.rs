//! Error type carrying the process exit code.

use shape4d_constellation::ConstellationError;
use shape4d_fiber::FiberError;
use shape4d_gmi::GmiError;
use shape4d_optimizer::OptimizerError;

/// Failure classes mapped onto exit codes: usage/parse errors exit 2,
/// numerical failures exit 3, everything else exits 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConstellationError> for CliError {
    fn from(e: ConstellationError) -> Self {
        match e {
            ConstellationError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GmiError> for CliError {
    fn from(e: GmiError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::NonFinite { .. } | FiberError::NonFiniteSnr { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
