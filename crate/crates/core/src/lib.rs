//! Topological invariants of 2-D gapped Bloch Hamiltonians.
//!
//! The crate computes the first Chern number and the Fu–Kane–Mele Z2 index
//! of tight-binding band insulators by constructing symmetric Bloch frames
//! on the boundary of the (effective) momentum unit cell and measuring the
//! winding of the residual gauge, cross-checked against Berry-curvature
//! integrals and a gauge-invariant plaquette sum.
//!
//! Organization:
//! - [`linalg`]: dense complex linear algebra for small matrices
//!   (Hermitian eigensolver, polar orthonormalization, principal logarithms
//!   of unitaries, determinant-phase winding).
//! - [`model`]: Bloch-Hamiltonian families (built-in models, hopping files),
//!   Fermi projectors, symmetry verification.
//! - [`frame`]: discrete parallel transport, obstruction unitaries and
//!   symmetric boundary frames on the unit cell and the effective half cell.
//! - [`invariants`]: Chern number by three routes, Z2 index by three routes,
//!   Berry connection/curvature fields.

pub mod config;
pub mod error;
pub mod frame;
pub mod invariants;
pub mod linalg;
pub mod model;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use frame::{BoundaryFrames, Cell, DiscretePath, FrameGrid, FramePath, Grid, ObstructionSet};
pub use invariants::{BerryField, InvariantResult, Method};
pub use linalg::{CMatrix, HermitianLog};
pub use model::{BlochModel, ProjectorSample, SymmetryReport, TrsData};
