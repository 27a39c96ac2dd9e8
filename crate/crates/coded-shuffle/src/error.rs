//! Error types shared across the crate.

use num_rational::Rational64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or running a shuffling protocol.
///
/// The variants split into two families the CLI maps to exit codes:
/// configuration problems (bad parameters, out-of-range storage, divisibility)
/// and protocol failures (inconsistent state, missing fragments, violated
/// invariants). The latter should never fire for a correct scheme; they exist
/// as oracles for the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point dimension must be an even number of bits >= 2, got {dim_bits}")]
    BadDimension { dim_bits: usize },

    #[error("dataset must contain at least one point")]
    EmptyDataset,

    #[error("{k} workers cannot evenly split {n} points")]
    UnevenBatches { n: usize, k: usize },

    #[error("assignment is not a valid equal partition: {reason}")]
    BadAssignment { reason: String },

    #[error("{count} equal partitions of {n} points into {k} batches exceeds the cap of {cap}")]
    EnumerationCapExceeded {
        n: usize,
        k: usize,
        count: u128,
        cap: u64,
    },

    #[error("{pairs} shuffle pairs exceeds the enumeration cap of {cap}")]
    PairCapExceeded { pairs: u128, cap: u64 },

    #[error("storage {storage} points is outside the feasible range [{min}, {max}] for k={k}, n={n}")]
    StorageOutOfRange {
        k: usize,
        n: usize,
        storage: Rational64,
        min: Rational64,
        max: Rational64,
    },

    #[error("no schemes are implemented for k={k} workers")]
    UnsupportedWorkerCount { k: usize },

    #[error("scheme requires {expected}, got {actual}")]
    SchemeMismatch { expected: String, actual: String },

    #[error("slice of {width} bits cannot be split as required: {reason}")]
    SliceDivisibility { width: usize, reason: String },

    #[error("invalid memory-sharing fraction {alpha}: must lie in [0, 1]")]
    BadShareFraction { alpha: Rational64 },

    #[error("cannot parse '{text}' as a rational number")]
    BadRational { text: String },

    #[error("protocol state error: {0}")]
    ProtocolState(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("invariant violation [{name}]: {detail}")]
    InvariantViolation { name: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for a named invariant violation.
    pub fn invariant(name: &str, detail: impl Into<String>) -> Self {
        Error::InvariantViolation {
            name: name.to_string(),
            detail: detail.into(),
        }
    }

    /// True for errors that indicate a broken protocol run rather than bad
    /// input; the CLI reports these with exit code 1.
    pub fn is_protocol_failure(&self) -> bool {
        matches!(
            self,
            Error::ProtocolState(_) | Error::ProtocolViolation(_) | Error::InvariantViolation { .. }
        )
    }
}
