//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by document parsing, calculus preconditions, and
/// resource caps.
#[derive(Debug, Error)]
pub enum Error {
    /// The network document is not valid JSON.
    #[error("malformed network document: {0}")]
    Json(#[from] serde_json::Error),

    /// The network document parsed as JSON but violates the schema.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// Khatri-Rao factors must agree on column count.
    #[error("column count mismatch: left has {left}, right has {right}")]
    ColumnCountMismatch { left: usize, right: usize },

    /// An index fell outside its declared 1-based range.
    #[error("{what} index {index} out of range [1..{bound}]")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    /// A truth table has no entry for an argument tuple.
    #[error("truth table is missing an entry for arguments {tuple:?}")]
    MissingTableEntry { tuple: Vec<u64> },

    /// A truth table entry is not a value of the codomain.
    #[error("table value {value} outside logic domain of size {domain}")]
    ValueOutOfDomain { value: u64, domain: usize },

    /// A switching signal ended before the requested horizon.
    #[error("switching signal provides only {available} of {needed} steps")]
    SignalTooShort { needed: usize, available: usize },

    /// A brute-force operation would exceed its configured resource cap.
    #[error("{what} needs {required}, which exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    /// A probability distribution vector is invalid.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An argument is syntactically valid but unusable.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two criteria that must agree produced different verdicts. Seeing this
    /// means a bug in the analysis itself, not in the input.
    #[error("internal inconsistency: {0}")]
    CriteriaDisagree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
