//! Error and result types shared by every module of this crate.

use thiserror::Error;

/// Convenience alias used by all fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of kernel preparation, graph learning, the alternating
/// solver, the clustering baselines, and the evaluation metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that must be square was not.
    #[error("{context}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    /// An input contained NaN or an infinity.
    #[error("{context}: non-finite value {value} at ({row}, {col})")]
    NonFinite {
        context: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    /// A matrix that must be symmetric was not, within tolerance.
    #[error(
        "{context}: matrix is not symmetric \
         (max |A[i,j] - A[j,i]| = {residual:.3e}, tolerance {tolerance:.1e})"
    )]
    NotSymmetric {
        context: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// Two inputs disagreed on a dimension.
    #[error("{context}: dimension mismatch (expected {expected}, got {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// A parameter was outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An input collection was empty where at least one element is required.
    #[error("{context}: input is empty")]
    EmptyInput { context: &'static str },

    /// Sample `index` has numerically zero centered self-similarity, so the
    /// kernel cannot be scaled to unit diagonal.
    #[error(
        "sample {index} has centered self-similarity {value:.3e} (<= 1e-14); \
         kernel cannot be normalized"
    )]
    DegenerateSample { index: usize, value: f64 },

    /// Every kernel-to-graph alignment was non-positive, leaving the weight
    /// update without a feasible direction.
    #[error("all kernel alignments with the affinity graph are non-positive; weights are undefined")]
    DegenerateAlignment,

    /// A kernel produced a vanishing residual trace during a weight update.
    #[error("kernel {index} has vanishing residual trace {value:.3e}; weights are undefined")]
    DegenerateKernel { index: usize, value: f64 },

    /// A label was outside `[0, clusters)`.
    #[error("label {label} at position {position} is out of range for {clusters} clusters")]
    LabelOutOfRange {
        label: usize,
        position: usize,
        clusters: usize,
    },

    /// The iterative eigensolver did not converge.
    #[error("eigendecomposition of a {size}x{size} matrix did not converge within {max_iterations} iterations")]
    EigenFailure { size: usize, max_iterations: usize },

    /// The simplex-projection root finder did not reach its tolerance.
    #[error(
        "simplex projection for row {row} left residual {residual:.3e} \
         after {max_iterations} iterations (tolerance {tolerance:.1e})"
    )]
    ProjectionNoConvergence {
        row: usize,
        residual: f64,
        tolerance: f64,
        max_iterations: usize,
    },

    /// A matrix expected to be positive semidefinite was not.
    #[error("{context}: matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite {
        context: &'static str,
        min_eigenvalue: f64,
    },
}
