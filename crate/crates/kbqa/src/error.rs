//! Crate-wide error type.
//!
//! Variants are grouped by pipeline stage. The CLI maps them onto exit codes:
//! usage-class errors (`UnknownRelation`, `UnknownEntity`, `InvalidArgument`)
//! exit with 2, everything else with 1.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("entities appear in facts but have no type entry: {}", entities.join(", "))]
    MissingTypes { entities: Vec<String> },

    #[error("unknown relation: {0}")]
    UnknownRelation(String),

    #[error("unknown entity: {0}")]
    UnknownEntity(String),

    #[error(
        "relation {relation} has {available} subjects with objects, but {requested} were requested"
    )]
    InsufficientSubjects {
        relation: String,
        available: usize,
        requested: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training set contains no {missing} examples")]
    SingleClass { missing: &'static str },

    #[error(
        "cannot train {stage} for {relation}: {positives} positive / {negatives} negative \
         examples; both classes are required"
    )]
    InsufficientTraining {
        stage: String,
        relation: String,
        positives: usize,
        negatives: usize,
    },

    #[error("non-finite feature value in example from {provenance}")]
    NonFiniteFeature { provenance: String },

    #[error("model expects {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("model file declares unsupported classifier {0:?}")]
    UnsupportedClassifier(String),

    #[error("ranked list contains duplicate entity: {0}")]
    DuplicateRanked(String),

    #[error("cannot average over an empty evaluation list")]
    EmptyEvaluations,

    #[error("no candidate templates to select from")]
    EmptyCandidates,

    #[error("snippet backend failed for question {question:?}: {message}")]
    Backend { question: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownRelation(_) | Error::UnknownEntity(_) | Error::InvalidArgument(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
