use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::annotation::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("malformed file {path}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    MalformedFile {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },

    #[error("unsupported language {0:?}; only \"english\" is supported")]
    UnsupportedLanguage(String),

    #[error("unknown context id {0}")]
    UnknownContext(String),

    #[error("duplicate question id {0}")]
    DuplicateId(String),

    #[error("sample of {requested} requested but only {available} entries are available")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("unsupported part of speech {0:?} for antonym lookup")]
    UnsupportedPos(String),

    #[error("cannot train a language model on an empty corpus")]
    EmptyCorpus,

    #[error("duplicate score key {0:?}")]
    DuplicateKey(String),

    #[error("no score for candidate {0:?}")]
    MissingScore(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("annotation does not validate against the corpus ({} violations)", .0.len())]
    Validation(Vec<Violation>),

    #[error("while augmenting question {question_id}: {source}")]
    Seed {
        question_id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn malformed(
        path: impl Into<PathBuf>,
        line: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::MalformedFile {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::SchemaViolation { .. } => 2,
            Error::Config(_) | Error::UnsupportedLanguage(_) | Error::SampleTooLarge { .. } => 3,
            Error::Io { .. } | Error::MissingFile(_) | Error::MalformedFile { .. } => 4,
            Error::Seed { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
