//! Numerical tolerances and refinement limits.

use serde::{Deserialize, Serialize};

/// Tolerance configuration shared by all modules.
///
/// Every threshold used by the algorithms lives here so that a single
/// struct (overridable from the CLI) controls the numerics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Hermiticity residual accepted by the eigensolver.
    pub herm: f64,
    /// Residual accepted on eigendecomposition and orthonormality checks.
    pub eig: f64,
    /// Smallest singular value accepted when orthonormalizing a frame.
    pub rank: f64,
    /// Unitarity residual accepted by the principal logarithm.
    pub unitary: f64,
    /// Reconstruction residual ||exp(iT) - U|| accepted by the logarithm.
    pub exp: f64,
    /// Distance to the branch cut at -pi below which the logarithm refuses
    /// to choose a branch.
    pub branch: f64,
    /// Overlap unitarity residual above which two frames are declared to
    /// span different subspaces.
    pub gauge: f64,
    /// Spectral gap below which a momentum counts as metallic.
    pub gap: f64,
    /// Largest accepted Frobenius distance between frames at adjacent grid
    /// nodes; larger jumps trigger grid refinement.
    pub cont: f64,
    /// Largest accepted |raw - nearest integer| when snapping invariants.
    pub snap: f64,
    /// Cap for automatic grid-doubling refinement.
    pub max_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            eig: 1e-10,
            rank: 1e-8,
            unitary: 1e-8,
            exp: 1e-8,
            branch: 1e-6,
            gauge: 1e-6,
            gap: 1e-8,
            cont: 0.5,
            snap: 0.1,
            max_grid: 4096,
        }
    }
}
