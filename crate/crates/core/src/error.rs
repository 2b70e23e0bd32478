use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("missing titles for field {0}")]
    MissingTitles(String),

    #[error("field {0} has no documents")]
    NoDocuments(String),

    #[error("field {0} has no body tokens")]
    EmptyField(String),

    #[error("corpus needs at least 2 fields, found {0}")]
    TooFewFields(usize),

    #[error("invalid field name {0:?}")]
    InvalidField(String),

    #[error("unknown field {0}")]
    UnknownField(String),

    #[error("out-of-vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("{0} is a field-specific term and needs a field")]
    FieldRequired(String),

    #[error("{0} is not a field-specific term")]
    NotATerm(String),

    #[error("global vocabulary is empty")]
    EmptyGlobalVocab,

    #[error("no in-vocabulary tokens to train on")]
    EmptyEffectiveCorpus,

    #[error("non-finite loss at center slot {center} (negatives {negatives:?}); learning rate too high?")]
    NonFinite { center: usize, negatives: Vec<usize> },

    #[error("cosine of a zero vector")]
    ZeroVector,

    #[error("zero variance")]
    ZeroVariance,

    #[error("ideal DCG is zero")]
    ZeroIdealDcg,

    #[error("model not found: {}", .0.display())]
    ModelNotFound(PathBuf),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { context: context.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
