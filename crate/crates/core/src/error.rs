use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("path does not exist: {0}")]
    MissingPath(PathBuf),

    #[error("category directory is empty: {0}")]
    EmptyCategory(PathBuf),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("document `{0}` has no label")]
    UnlabeledDocument(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown term `{0}`")]
    UnknownTerm(String),

    #[error("need at least 2 categories, found {0}")]
    TooFewClasses(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{fraction:.1}% of documents have no embedded token (limit {limit:.1}%)")]
    TooManyOutOfVocabulary { fraction: f64, limit: f64 },

    #[error("linear system is numerically singular (C too large or degenerate hidden output)")]
    Singular,

    #[error("no boosting round reached an acceptable error; last eps = {last_eps:.6} after {attempts} attempts")]
    NoAcceptableRound { last_eps: f64, attempts: usize },

    #[error("incompatible file version: expected `{expected}`, found `{found}`")]
    Version { expected: String, found: String },

    #[error("class lists differ: model has {model:?}, data has {data:?}")]
    ClassMismatch { model: Vec<String>, data: Vec<String> },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid cell (c = {c:e}, L = {hidden}): {source}")]
    GridCell {
        c: f64,
        hidden: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
