use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
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

    #[error("document {id}: cannot read text file {path}: {source}")]
    DocumentLoad {
        id: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("invalid document {id:?}: {message}")]
    InvalidDocument { id: String, message: String },

    #[error("synonym chain: {surface:?} -> {canonical:?}, but {canonical:?} is itself mapped to {next:?}")]
    SynonymChain {
        surface: String,
        canonical: String,
        next: String,
    },

    #[error("empty vocabulary: {0}")]
    EmptyVocabulary(String),

    #[error("invalid rank: {0}")]
    InvalidRank(String),

    #[error("NMF objective became non-finite at iteration {iteration}")]
    NumericalFailure { iteration: usize },

    #[error("topic {0} is out of range")]
    TopicOutOfRange(usize),

    #[error("topic {0} is excluded")]
    TopicExcluded(usize),

    #[error("topics missing from the label map: {0:?}")]
    UnlabeledTopics(Vec<usize>),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("eigenvector centrality did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("node sets differ between centrality scorings")]
    MismatchedNodes,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
