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

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: file contains no edges")]
    EmptyEdgeList { path: PathBuf },

    #[error("unknown node id `{0}` (strict id policy)")]
    UnknownId(String),

    #[error("duplicate node id `{0}`")]
    DuplicateId(String),

    #[error("node `{0}` is missing from the input")]
    MissingNode(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {nodes} nodes, above the limit of {limit}")]
    GraphTooLarge { nodes: usize, limit: usize },

    #[error("orbit matrix needs ~{required} bytes, budget is {budget} bytes")]
    MemoryBudget { required: u64, budget: u64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("orbit {0} is constant over the data; no effect grid can be built")]
    ConstantFeature(usize),

    #[error("need at least two populated classes, found {0}")]
    TooFewClasses(usize),

    #[error("need at least two distinct disciplines, found {0}")]
    TooFewDisciplines(usize),

    #[error("edge direction requested but the graph carries no direction information")]
    NoDirection,

    #[error("{0}")]
    Degenerate(String),
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

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse {
            path: PathBuf::new(),
            line,
            message: err.to_string(),
        }
    }
}
