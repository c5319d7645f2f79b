//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the pipeline, from dataset synthesis
/// to report emission.
#[derive(Error, Debug)]
pub enum Error {
    /// A configuration or specification failed validation before any work ran.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Input data violates a precondition (zero column, empty matrix, NaN, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two arguments that must agree in shape do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A file on disk does not follow the expected layout.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    /// An iterative solver produced a non-finite or exploding objective.
    #[error("solver diverged: {0}")]
    Divergence(String),

    /// An eigenvalue routine failed to converge.
    #[error("eigensolver did not converge: {0}")]
    Eigen(String),

    /// A dense operation would exceed the configured memory budget.
    #[error("memory budget exceeded: needs {required} bytes, budget is {budget} bytes")]
    MemoryBudget { required: u64, budget: u64 },

    /// Too many per-column solves failed inside a batch run.
    #[error("{failed} of {total} column solves failed (threshold {threshold_percent}%)")]
    SolverFailures {
        failed: usize,
        total: usize,
        threshold_percent: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
