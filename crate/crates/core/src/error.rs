use std::path::PathBuf;

/// Errors produced by the clustering library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no links")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("clustering is overlapping; evaluate it on the decomposed network instead")]
    OverlappingClustering,

    #[error("clustering does not cover node {0}")]
    IncompleteClustering(usize),

    #[error("brute-force enumeration supports at most {max} nodes, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("link removal infeasible: removed {achieved} of {requested} links")]
    InfeasibleRemoval { achieved: usize, requested: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
