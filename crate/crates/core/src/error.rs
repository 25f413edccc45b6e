use thiserror::Error;

use crate::augment::AugmentError;
use crate::config::ConfigViolations;
use crate::dataset::DatasetError;
use crate::domain::DomainError;
use crate::encoder::EncoderError;
use crate::gap::GapError;
use crate::metrics::MetricsError;
use crate::stats::StatsError;
use crate::ttest::TTestError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for a verification run.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigViolations),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    TTest(#[from] TTestError),
    #[error("round {round} failed: {source}")]
    RoundFailed {
        round: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("cannot resolve {what} locator {locator:?}: {reason}")]
    Unresolvable {
        what: &'static str,
        locator: String,
        reason: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
