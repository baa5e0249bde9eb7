use thiserror::Error;

/// Errors raised by the cut engine and its supporting machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input (dimension mismatch, NaN coordinates, bad permutation).
    #[error("input error: {0}")]
    Input(String),
    /// Problem data that violates a modelling assumption, e.g. a negative cut weight.
    #[error("model error: {0}")]
    Model(String),
    /// Floating point trouble: singular basis, failed factorization, iteration limit.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A brute-force routine was asked to enumerate more than it is allowed to.
    #[error("capacity error: {what} is limited to n <= {limit}, got n = {n}")]
    Capacity {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A cut that fails validation against known feasible points.
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn capacity(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capacity { what, n, limit })
    } else {
        Ok(())
    }
}
