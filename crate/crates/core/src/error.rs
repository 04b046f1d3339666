use std::io;
use std::path::PathBuf;

use crate::vocab::Word;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{0}")]
    RawIo(#[from] io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("corrupt model file at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("out of vocabulary: {0}")]
    OutOfVocabulary(Word),

    #[error("similarity undefined for {0}: zero vector")]
    UndefinedSimilarity(Word),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("fingerprint mismatch: expected {expected}, input carries {found}")]
    FingerprintMismatch { expected: String, found: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// `true` for the vocabulary-coverage failures the CLI reports with exit code 2.
    pub fn is_coverage(&self) -> bool {
        matches!(
            self,
            Error::OutOfVocabulary(_) | Error::UndefinedSimilarity(_) | Error::Evaluation(_)
        )
    }
}
