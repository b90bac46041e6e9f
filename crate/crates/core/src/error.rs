use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Only conditions that make a run meaningless are errors; malformed corpus
/// records, dangling references and empty orientations are counted instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate message id `{0}`")]
    DuplicateId(String),

    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    StdIo(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by a bad configuration rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::InvalidLexicon(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
