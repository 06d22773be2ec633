use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] eqzero_core::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot serialize {what}: {source}")]
    Json {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    /// 2 configuration, 3 numerical breakdown, 4 insufficient statistics.
    pub fn exit_code(&self) -> i32 {
        use eqzero_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
            CliError::Core(e) => match e {
                E::NonConvergence { .. }
                | E::NumericalBreakdown { .. }
                | E::MapInversionFailure { .. }
                | E::NearDiagonal { .. } => 3,
                E::InsufficientStatistics { .. } => 4,
                E::LengthMismatch { .. }
                | E::DegenerateBoundary(_)
                | E::WeightNotPositive { .. }
                | E::QuadratureTooCoarse { .. }
                | E::GridTooCoarse { .. }
                | E::InvalidInput(_)
                | E::DomainFile { .. } => 2,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
