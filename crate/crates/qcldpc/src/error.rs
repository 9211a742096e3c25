//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid difference family: {0}")]
    InvalidFamily(String),
    #[error("no catalog entry for k={k}, t={t}")]
    NotInCatalog { k: usize, t: usize },
    #[error("invalid shift vector: {0}")]
    InvalidShiftVector(String),
    #[error("dispersion plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("lifting degree {n} too small: matrix contains shift {max_shift}")]
    LiftingDegreeTooSmall { n: u32, max_shift: u32 },
    #[error("invalid base walk: {0}")]
    InvalidWalk(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("alist parse error: {0}")]
    AlistParse(String),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
