//! Dense numerical primitives shared by every other module.
//!
//! The scope is deliberately narrow: validated matrix/vector containers, a
//! pivoted-QR least-squares solver, a minimum-norm variant for singular
//! designs, second-order finite differences on nonuniform grids, Spearman
//! rank correlation with a permutation test, and a reproducible random
//! stream abstraction. There is no general-purpose linear algebra surface
//! here; anything not needed by the experiments stays out.

mod finitediff;
mod matrix;
mod random;
mod solve;
mod stats;

pub use finitediff::{finite_difference_derivative, BoundaryOrder};
pub use matrix::{Matrix, Vector};
pub use random::RandomStream;
pub use solve::{min_norm_least_squares, solve_least_squares};
pub use stats::{spearman_rho, SpearmanResult};

use thiserror::Error;

/// Errors produced by the numerics layer.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The design matrix has (numerically) dependent columns. The pivot
    /// magnitudes come from the column-pivoted QR factorization, so the
    /// leading pivot is the largest one.
    #[error(
        "rank-deficient design: pivot {pivot:.3e} at column {column} is below \
         {tol:.0e} x leading pivot {leading:.3e}"
    )]
    RankDeficient {
        column: usize,
        pivot: f64,
        leading: f64,
        tol: f64,
    },

    #[error("grid is not strictly increasing at index {index}")]
    GridNotMonotone { index: usize },

    #[error("degenerate ranks: all {side} values are tied")]
    DegenerateRanks { side: &'static str },

    #[error("{context}: need at least {required} points, got {actual}")]
    TooFewPoints {
        context: &'static str,
        required: usize,
        actual: usize,
    },
}

pub type Result<T> = std::result::Result<T, NumericsError>;
