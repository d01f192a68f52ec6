use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("column `{0}` has no cells")]
    EmptyColumn(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("no column named `{0}`")]
    UnknownColumn(String),

    #[error("training labels contain a single class")]
    DegenerateLabels,

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid annotations: {0}")]
    Annotation(String),

    #[error("statistic is undefined: {0}")]
    Undefined(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
