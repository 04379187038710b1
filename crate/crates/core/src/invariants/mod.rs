//! Topological invariants by independent routes.
//!
//! Chern number: gauge-invariant plaquette sum ([`chern_plaquette`]),
//! Berry-curvature integral from projector derivatives
//! ([`chern_curvature`]), and the winding of the residual boundary gauge
//! ([`chern_obstruction`]). Z2 index: boundary-gauge winding parity
//! ([`fkm_obstruction`]), the half-cell curvature-minus-connection
//! formula ([`fkm_connection_curvature`]) and an independent lattice
//! discretization with a time-reversal-constrained boundary gauge
//! ([`fkm_lattice_oracle`]).

mod berry;
mod fkm;

pub use berry::{berry_field, BerryField};
pub use fkm::{fkm_connection_curvature, fkm_lattice_oracle, fkm_obstruction};

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::frame::{self, Cell, FrameGrid};
use crate::linalg::{self, CMatrix};
use crate::model::BlochModel;

/// Which route produced an invariant value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Obstruction,
    Curvature,
    Plaquette,
    FkmObstruction,
    FkmConnection,
    FkmLattice,
}

impl Method {
    pub const ALL_CHERN: [Method; 3] = [Method::Obstruction, Method::Curvature, Method::Plaquette];
    pub const ALL_Z2: [Method; 3] = [
        Method::FkmObstruction,
        Method::FkmConnection,
        Method::FkmLattice,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Obstruction => "obstruction",
            Method::Curvature => "curvature",
            Method::Plaquette => "plaquette",
            Method::FkmObstruction => "fkm_obstruction",
            Method::FkmConnection => "fkm_connection",
            Method::FkmLattice => "fkm_lattice",
        }
    }

    pub fn is_z2(&self) -> bool {
        matches!(
            self,
            Method::FkmObstruction | Method::FkmConnection | Method::FkmLattice
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obstruction" => Ok(Method::Obstruction),
            "curvature" => Ok(Method::Curvature),
            "plaquette" => Ok(Method::Plaquette),
            "fkm_obstruction" => Ok(Method::FkmObstruction),
            "fkm_connection" => Ok(Method::FkmConnection),
            "fkm_lattice" => Ok(Method::FkmLattice),
            other => Err(Error::Invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// An invariant value with its numerical provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantResult {
    pub method: Method,
    /// Un-snapped value (winding accumulation or curvature integral).
    pub raw: f64,
    /// Snapped integer; for Z2 methods this is the class in `{0, 1}`.
    pub value: i64,
    pub snap_residual: f64,
    pub grid_n: usize,
    /// Grid doublings performed before the computation stabilized.
    pub refinements: usize,
}

/// Errors that signal "refine the grid and retry" rather than a hard
/// failure.
pub(crate) fn refinable(e: &Error) -> bool {
    matches!(
        e,
        Error::StepTooLarge { .. }
            | Error::SnapFailed { .. }
            | Error::TooCoarse { .. }
            | Error::BranchAmbiguous { .. }
    )
}

/// Runs `attempt` at grid size `n`, doubling on refinable failures up to
/// `tol.max_grid`.
pub(crate) fn with_refinement<T>(
    n0: usize,
    tol: &Tolerances,
    mut attempt: impl FnMut(usize) -> Result<T>,
) -> Result<(T, usize, usize)> {
    let mut n = n0;
    let mut refinements = 0;
    loop {
        match attempt(n) {
            Ok(v) => return Ok((v, n, refinements)),
            Err(e) if refinable(&e) => {
                if n * 2 > tol.max_grid {
                    return Err(Error::RefinementExhausted {
                        n,
                        cause: e.to_string(),
                    });
                }
                n *= 2;
                refinements += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Deterministic phase twists applied to the input frame when an
/// obstruction eigenphase lands on the logarithm's branch cut.
///
/// Symmetry can pin an obstruction phase at exactly `-1` (the Zak phase
/// of a mirror-symmetric edge, or a Kramers overlap), where the principal
/// logarithm refuses to choose a branch. The invariants do not depend on
/// the input frame's gauge, so re-gauging by the smooth scalar field
/// `exp(i alpha (k_1 + k_2 + 1/4))` rotates every obstruction phase off
/// the cut without touching the result.
pub(crate) const GAUGE_NUDGES: [f64; 3] = [0.0, 0.37, 0.74];

pub(crate) fn with_gauge_nudges<T>(mut attempt: impl FnMut(f64) -> Result<T>) -> Result<T> {
    let mut last = Error::NoConvergence;
    for &alpha in &GAUGE_NUDGES {
        match attempt(alpha) {
            Err(e @ Error::BranchAmbiguous { .. }) => last = e,
            other => return other,
        }
    }
    Err(last)
}

pub(crate) fn nudge_phase(k: [f64; 2], alpha: f64) -> num_complex::Complex64 {
    num_complex::Complex64::from_polar(1.0, alpha * (k[0] + k[1] + 0.25))
}

/// Re-gauge a frame grid by the scalar nudge field.
pub(crate) fn nudge_grid(psi: &FrameGrid, alpha: f64) -> FrameGrid {
    if alpha == 0.0 {
        return psi.clone();
    }
    let grid = psi.grid;
    let mut frames = Vec::with_capacity(psi.frames.len());
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            let phase = nudge_phase(grid.node_k(i, j), alpha);
            frames.push(psi.frame(i, j) * phase);
        }
    }
    FrameGrid {
        grid,
        frames,
        max_jump: psi.max_jump,
    }
}

/// Occupied frames on the `n x n` fundamental torus grid, wrapped across
/// the cell boundary with the `tau` representation.
struct TorusFrames {
    n: usize,
    frames: Vec<CMatrix>,
    tau1: CMatrix,
    tau2: CMatrix,
    trivial_tau: bool,
}

impl TorusFrames {
    fn build(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<Self> {
        let mut frames = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let k = [-0.5 + i as f64 / n as f64, -0.5 + j as f64 / n as f64];
                frames.push(model.occupied_frame(k, tol)?);
            }
        }
        Ok(TorusFrames {
            n,
            frames,
            tau1: model.tau_lambda([1, 0]),
            tau2: model.tau_lambda([0, 1]),
            trivial_tau: model.periodic_gauge(),
        })
    }

    /// Frame at `(i, j)` with `0 <= i, j <= n`; the `i = n` / `j = n`
    /// seams are the tau-translates of the base row/column.
    fn at(&self, i: usize, j: usize) -> CMatrix {
        let base = &self.frames[(j % self.n) * self.n + (i % self.n)];
        if self.trivial_tau || (i < self.n && j < self.n) {
            return base.clone();
        }
        let mut out = base.clone();
        if i == self.n {
            out = &self.tau1 * out;
        }
        if j == self.n {
            out = &self.tau2 * out;
        }
        out
    }
}

/// Sum of plaquette phases `Arg prod(link determinants)` over a node
/// lattice, for counterclockwise plaquettes. Fails with
/// [`Error::TooCoarse`] when any single plaquette carries a phase of
/// `pi/2` or more.
pub(crate) fn plaquette_phase_sum(
    frame_at: impl Fn(usize, usize) -> CMatrix,
    nx: usize,
    ny: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..ny {
        let mut row_lower: Vec<CMatrix> = Vec::new();
        for i in 0..=nx {
            row_lower.push(frame_at(i, j));
        }
        let mut row_upper: Vec<CMatrix> = Vec::new();
        for i in 0..=nx {
            row_upper.push(frame_at(i, j + 1));
        }
        for i in 0..nx {
            let d1 = (row_lower[i].adjoint() * &row_lower[i + 1]).determinant();
            let d2 = (row_lower[i + 1].adjoint() * &row_upper[i + 1]).determinant();
            let d3 = (row_upper[i + 1].adjoint() * &row_upper[i]).determinant();
            let d4 = (row_upper[i].adjoint() * &row_lower[i]).determinant();
            let phase = (d1 * d2 * d3 * d4).arg();
            if phase.abs() >= PI / 2.0 {
                return Err(Error::TooCoarse { max_jump: phase.abs() });
            }
            total += phase;
        }
    }
    Ok(total)
}

/// Chern number from the gauge-invariant plaquette field on the full
/// torus. The sum of plaquette phases is an exact multiple of `2 pi` for
/// any gapped sample, so no snapping tolerance is involved.
pub fn chern_plaquette(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<InvariantResult> {
    if n < 8 {
        return Err(Error::Invalid("plaquette grid needs N >= 8".into()));
    }
    let ((value, _), grid_n, refinements) = with_refinement(n, tol, |n| {
        let torus = TorusFrames::build(model, n, tol)?;
        let total = plaquette_phase_sum(|i, j| torus.at(i, j), n, n)?;
        let raw = total / TAU;
        let value = raw.round();
        if (raw - value).abs() > 1e-6 {
            return Err(Error::SnapFailed {
                raw,
                residual: (raw - value).abs(),
            });
        }
        Ok((value as i64, raw))
    })?;
    Ok(InvariantResult {
        method: Method::Plaquette,
        raw: value as f64,
        value,
        snap_residual: 0.0,
        grid_n,
        refinements,
    })
}

/// Chern number as the Berry-curvature integral, with the curvature
/// density computed from central differences of the Fermi projector
/// alone: `F_12 = -i Tr(P [d_1 P, d_2 P])`.
pub fn chern_curvature(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<InvariantResult> {
    if n < 8 {
        return Err(Error::Invalid("curvature grid needs N >= 8".into()));
    }
    let ((raw, value, residual), grid_n, refinements) = with_refinement(n, tol, |n| {
        let mut projectors = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let k = [-0.5 + i as f64 / n as f64, -0.5 + j as f64 / n as f64];
                projectors.push(model.fermi_projector(k, tol)?.p);
            }
        }
        let tau1 = model.tau_lambda([1, 0]);
        let tau2 = model.tau_lambda([0, 1]);
        let trivial = model.periodic_gauge();
        let p_at = |i: i64, j: i64| -> CMatrix {
            let iw = i.rem_euclid(n as i64) as usize;
            let jw = j.rem_euclid(n as i64) as usize;
            let base = &projectors[jw * n + iw];
            if trivial {
                return base.clone();
            }
            // Wrap counts: P(k + a e1 + b e2) = tau1^a tau2^b P tau^(-1).
            let a = (i - iw as i64) / n as i64;
            let b = (j - jw as i64) / n as i64;
            let mut out = base.clone();
            for _ in 0..a.unsigned_abs() {
                out = if a > 0 {
                    &tau1 * out * tau1.adjoint()
                } else {
                    tau1.adjoint() * out * &tau1
                };
            }
            for _ in 0..b.unsigned_abs() {
                out = if b > 0 {
                    &tau2 * out * tau2.adjoint()
                } else {
                    tau2.adjoint() * out * &tau2
                };
            }
            out
        };
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        for j in 0..n as i64 {
            for i in 0..n as i64 {
                let dp1 = (p_at(i + 1, j) - p_at(i - 1, j)).scale(0.5 / h);
                let dp2 = (p_at(i, j + 1) - p_at(i, j - 1)).scale(0.5 / h);
                let comm = &dp1 * &dp2 - &dp2 * &dp1;
                let density = (&projectors[(j as usize) * n + i as usize] * comm).trace();
                // -i Tr(P [d1P, d2P]); the trace is purely imaginary.
                total += density.im * h * h;
            }
        }
        let raw = total / TAU;
        let value = raw.round();
        let residual = (raw - value).abs();
        if residual >= tol.snap {
            return Err(Error::SnapFailed { raw, residual });
        }
        Ok((raw, value as i64, residual))
    })?;
    Ok(InvariantResult {
        method: Method::Curvature,
        raw,
        value,
        snap_residual: residual,
        grid_n,
        refinements,
    })
}

/// Pinned orientation relation between the counterclockwise winding of
/// `det U_hat` and the Chern number: with this crate's conventions the
/// boundary-gauge determinant winds opposite to the plaquette sum.
pub(crate) const OBSTRUCTION_SIGN: i64 = -1;

/// Chern number as the winding of the residual boundary gauge: sweep a
/// continuous frame over the cell, enforce tau-equivariance on the
/// boundary through the vertex obstruction logs, and count the
/// determinant winding of the gauge between the two frames.
pub fn chern_obstruction(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<InvariantResult> {
    let ((raw, value), grid_n, refinements) = with_refinement(n, tol, |n| {
        let psi = frame::sweep_frame(model, n, Cell::Full, tol)?;
        chern_obstruction_from_frames(model, &psi, tol)
    })?;
    Ok(InvariantResult {
        method: Method::Obstruction,
        raw,
        value,
        snap_residual: (raw - raw.round()).abs(),
        grid_n,
        refinements,
    })
}

/// Obstruction-route Chern number from an already-swept frame field
/// (entry point for the gauge-robustness checks, which pre-twist the
/// input frames).
pub fn chern_obstruction_from_frames(
    model: &BlochModel,
    psi: &FrameGrid,
    tol: &Tolerances,
) -> Result<(f64, i64)> {
    with_gauge_nudges(|alpha| {
        let psi = nudge_grid(psi, alpha);
        let obstructions = frame::obstruction_chern(model, &psi, tol)?;
        let boundary = frame::boundary_frame_chern(model, &psi, &obstructions, tol)?;
        let (degree, _) = linalg::det_phase_winding(&boundary.gauge, tol)?;
        let (acc, _) = linalg::det_phase_accumulation(&boundary.gauge);
        Ok((OBSTRUCTION_SIGN as f64 * acc, OBSTRUCTION_SIGN * degree))
    })
}

#[cfg(test)]
mod tests;
