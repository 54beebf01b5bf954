//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the toolkit's operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimension must be at least 1 (at least 2 for some operations).
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    /// Two geometric objects disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A numeric argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Operation requires a nonempty graph.
    #[error("graph has no nodes")]
    EmptyGraph,

    /// A percolation curve never crosses the requested level.
    #[error("no upward crossing of theta={theta} in the swept density range; widen the grid")]
    NoCrossing { theta: f64 },

    /// The chain sampler exceeded its proposal budget.
    #[error("chain rejection loop exceeded {cap} proposals")]
    RejectionCapExceeded { cap: u64 },

    /// Mean degree outside the subcritical regime covered by the bound.
    #[error("mean degree {mu} is not below the t=3 bound {limit}; the growth check only applies below it")]
    OutOfSubcriticalRegime { mu: f64, limit: f64 },

    /// A node index is not part of the supplied subset or graph.
    #[error("node {node} not in the supplied node set")]
    NodeNotInSet { node: usize },

    /// Requested coefficient method is not available for the parameters.
    #[error("method {method} is not available for d={d}, t={t}")]
    UnsupportedMethod {
        method: &'static str,
        d: usize,
        t: usize,
    },

    /// I/O failure while reading or writing an artifact.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed input file (edge list or config).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
