use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid argument (wrong kind, empty list, bad range).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A stated precondition does not hold, so the bound is not guaranteed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Offered load at a node is at or above capacity.
    #[error("unstable at node {node}: utilization {utilization}")]
    Unstable { node: usize, utilization: f64 },

    /// Combination of tail-bound kinds with no supported closed form.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Numeric inversion could not bracket the target inside the search range.
    #[error("search range exhausted: {0}")]
    RangeExhausted(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
