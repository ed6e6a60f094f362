//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by ingestion, kernels, evaluation, and the sweep runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: rating {value} outside [1,5]")]
    RatingOutOfRange { line: usize, value: i64 },

    #[error("threshold {0} outside [1,5]")]
    InvalidThreshold(u8),

    #[error("no link survives coarse-graining: the graph would be empty")]
    EmptyGraph,

    #[error("train fraction {0} outside (0,1]")]
    InvalidFraction(f64),

    #[error("similarity kind {found} does not match the {expected} contract")]
    KindMismatch {
        expected: &'static str,
        found: String,
    },

    #[error("probe entry references object index {object} but the graph has {m} objects")]
    UnknownObject { object: usize, m: usize },

    #[error("diversity needs at least two non-empty recommendation lists")]
    TooFewLists,

    #[error("popularity needs at least one non-empty recommendation list")]
    NoNonEmptyLists,

    #[error("sweep produced no rows; nothing to report")]
    EmptyResult,

    #[error("{path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error("cache was built for a different training graph (content hash mismatch)")]
    CacheGraphMismatch,

    #[error("run failed for variant {variant} at lambda {lambda} (seed {seed}): {source}")]
    SweepCell {
        variant: String,
        lambda: f64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
