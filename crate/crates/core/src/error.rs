//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building models or computing invariants.
#[derive(Debug, Error)]
pub enum Error {
    /// Input matrix fails the Hermiticity check.
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    /// Iterative eigen/SVD solver did not converge.
    #[error("eigensolver failed to converge")]
    NoConvergence,

    /// Frame columns are (numerically) linearly dependent; the transport
    /// step crossed a gap closing or the grid is too coarse.
    #[error("rank-deficient frame (smallest singular value {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },

    /// Input matrix fails the unitarity check.
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    /// An eigenphase sits within tolerance of the branch cut at -pi, so the
    /// principal logarithm is numerically ill-defined.
    #[error("eigenphase within {margin:.3e} of the branch cut at -pi")]
    BranchAmbiguous { margin: f64 },

    /// Overlap of two frames is far from unitary: they span different
    /// subspaces.
    #[error("frames span different subspaces (overlap unitarity residual {residual:.3e})")]
    SubspaceMismatch { residual: f64 },

    /// A determinant-phase increment reached pi/2; the loop discretization
    /// must be refined before the winding is trustworthy.
    #[error("winding step {max_step:.4} >= pi/2; refine the loop discretization")]
    StepTooLarge { max_step: f64 },

    /// Adjacent grid frames jump by more than the continuity threshold;
    /// the grid is too coarse for the projector's variation.
    #[error("adjacent frames jump by {max_jump:.4}; grid too coarse")]
    TooCoarse { max_jump: f64 },

    /// A raw invariant value failed to snap to the nearest integer.
    #[error("value {raw:.4} failed to snap to an integer (residual {residual:.4})")]
    SnapFailed { raw: f64, residual: f64 },

    /// Spectral gap below tolerance at some momentum: the Fermi projector
    /// is undefined there.
    #[error("spectral gap closed at k = ({k1:.6}, {k2:.6}) (gap {gap:.3e})")]
    GapClosed { k1: f64, k2: f64, gap: f64 },

    /// Malformed model file.
    #[error("model file: {0}")]
    ParseError(String),

    /// Hopping list violates H(-R) = H(R)^dagger.
    #[error("hoppings violate H(-R) = H(R)^dagger at R = ({0}, {1})")]
    HermiticityViolation(i64, i64),

    /// Time-reversal data fails its defining algebra.
    #[error("time-reversal data inconsistent: {0}")]
    TrsInconsistent(String),

    /// Obstruction unitary violates the epsilon compatibility relation;
    /// the model's time-reversal data is broken.
    #[error("obstruction unitary violates epsilon compatibility (residual {residual:.3e})")]
    CompatViolated { residual: f64 },

    /// A Z2 route was requested for a model without time-reversal data.
    #[error("model carries no time-reversal data")]
    NoTrs,

    /// Automatic grid refinement hit the configured cap without the
    /// computation stabilizing.
    #[error("refinement cap reached at N = {n}: {cause}")]
    RefinementExhausted { n: usize, cause: String },

    /// Invalid argument or configuration.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Underlying I/O failure.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
