use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty graph")]
    EmptyGraph,

    #[error("graph needs at least 2 nodes, found {0}")]
    TooFewNodes(usize),

    #[error("partition covers {assigned} of {nodes} nodes")]
    PartialPartition { assigned: usize, nodes: usize },

    #[error("no documents left after vocabulary pruning")]
    EmptyCorpus,

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("no scorable tokens")]
    NoScorableTokens,

    #[error("empty contingency")]
    EmptyContingency,

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("insufficient minority samples: class {class} has {count}")]
    InsufficientMinority { class: usize, count: usize },

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("row count mismatch: {0}")]
    RowMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

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

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
