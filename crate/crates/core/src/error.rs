use thiserror::Error;

/// Errors produced by the numerics and the command-line layer.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested size would exceed a fixed memory/time guard.
    #[error("capacity exceeded for {what}: requested {requested}, limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A quantity defined through a unique eigenvector was requested on a
    /// degenerate eigenspace.
    #[error("{what}: top eigenvalue is {multiplicity}-fold degenerate")]
    Degenerate {
        what: &'static str,
        multiplicity: usize,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("malformed input table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, requested: usize, limit: usize) -> Self {
        Error::Capacity {
            what,
            requested,
            limit,
        }
    }
}
