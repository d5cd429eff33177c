//! Error type shared by every stage of the pipeline.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input data, reported with the 1-based line it came from.
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Geometric degeneracy: collinear point sets, empty polygons, rays that
    /// miss the boundary entirely.
    #[error("degenerate geometry: {0}")]
    Geometry(String),

    /// An estimator cannot be computed from the data it was given.
    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
