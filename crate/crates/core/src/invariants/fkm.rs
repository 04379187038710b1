//! Fu--Kane--Mele index by three routes.

use std::f64::consts::{PI, TAU};

use super::{plaquette_phase_sum, with_refinement, InvariantResult, Method};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::frame::{self, Cell, FrameGrid, Grid};
use crate::linalg::{self, CMatrix};
use crate::model::BlochModel;

fn even(n: usize) -> usize {
    n + n % 2
}

/// Z2 index as the parity of the determinant winding of the residual
/// gauge between a continuous frame on the effective cell and the
/// symmetric boundary frame built from the obstruction logs.
pub fn fkm_obstruction(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<InvariantResult> {
    if !model.has_trs() {
        return Err(Error::NoTrs);
    }
    let ((raw, value), grid_n, refinements) = with_refinement(even(n), tol, |n| {
        let psi = frame::sweep_frame(model, even(n), Cell::Effective, tol)?;
        fkm_obstruction_from_frames(model, &psi, tol)
    })?;
    Ok(InvariantResult {
        method: Method::FkmObstruction,
        raw,
        value,
        snap_residual: (raw - raw.round()).abs(),
        grid_n,
        refinements,
    })
}

/// Obstruction-route Z2 index from an already-swept frame field on the
/// effective cell; returns `(raw winding, class)`.
pub fn fkm_obstruction_from_frames(
    model: &BlochModel,
    psi: &FrameGrid,
    tol: &Tolerances,
) -> Result<(f64, i64)> {
    super::with_gauge_nudges(|alpha| {
        let psi = super::nudge_grid(psi, alpha);
        let obstructions = frame::obstruction_trs(model, &psi, tol)?;
        let boundary = frame::boundary_frame_trs(model, &psi, &obstructions, tol)?;
        let (degree, _) = linalg::det_phase_winding(&boundary.gauge, tol)?;
        let (acc, _) = linalg::det_phase_accumulation(&boundary.gauge);
        Ok((acc, degree.rem_euclid(2)))
    })
}

/// Wilson line `sum Arg det(F_j^dagger F_{j+1})` along a frame sequence,
/// guarding each link against phase steps of `pi/2` or more.
fn wilson_line(frames: &[CMatrix]) -> Result<f64> {
    let mut total = 0.0;
    for w in frames.windows(2) {
        let step = (w[0].adjoint() * &w[1]).determinant().arg();
        if step.abs() >= PI / 2.0 {
            return Err(Error::StepTooLarge { max_step: step.abs() });
        }
        total += step;
    }
    Ok(total)
}

/// Z2 index from the half-cell curvature integral minus the boundary
/// Berry connection of the symmetric boundary frame:
/// `(1/2pi) int_Beff F - (1/2pi) oint Â mod 2`, discretized so the Stokes
/// defect cancels in the snap.
pub fn fkm_connection_curvature(
    model: &BlochModel,
    n: usize,
    tol: &Tolerances,
) -> Result<InvariantResult> {
    if !model.has_trs() {
        return Err(Error::NoTrs);
    }
    let ((raw, value, residual), grid_n, refinements) = with_refinement(even(n), tol, |n| {
        let n = even(n);
        let grid = Grid::new(Cell::Effective, n)?;
        // Gauge-invariant plaquette flux over the half cell, from raw
        // eigenframes.
        let mut eigenframes = Vec::with_capacity(grid.node_count());
        for j in 0..=grid.ny() {
            for i in 0..=grid.nx() {
                eigenframes.push(model.occupied_frame(grid.node_k(i, j), tol)?);
            }
        }
        let flux = plaquette_phase_sum(
            |i, j| eigenframes[grid.index(i, j)].clone(),
            grid.nx(),
            grid.ny(),
        )?;
        // Boundary Berry connection of the symmetric frame.
        let psi = frame::sweep_frame(model, n, Cell::Effective, tol)?;
        let obstructions = frame::obstruction_trs(model, &psi, tol)?;
        let boundary = frame::boundary_frame_trs(model, &psi, &obstructions, tol)?;
        let connection = wilson_line(&boundary.phi.frames)?;
        let raw = (flux - connection) / TAU;
        let nearest = raw.round();
        let residual = (raw - nearest).abs();
        if residual >= tol.snap {
            return Err(Error::SnapFailed { raw, residual });
        }
        Ok((raw, (nearest as i64).rem_euclid(2), residual))
    })?;
    Ok(InvariantResult {
        method: Method::FkmConnection,
        raw,
        value,
        snap_residual: residual,
        grid_n,
        refinements,
    })
}

/// Independent lattice Z2 oracle: plaquette flux over the half cell minus
/// the boundary Wilson line of a time-reversal-constrained eigenframe
/// gauge (Kramers-normalized at the invariant momenta, reflected onto the
/// upper half of the vertical edges, translated onto the top edge).
pub fn fkm_lattice_oracle(model: &BlochModel, n: usize, tol: &Tolerances) -> Result<InvariantResult> {
    if !model.has_trs() {
        return Err(Error::NoTrs);
    }
    let eps = model.epsilon()?.clone();
    let ((raw, value, residual), grid_n, refinements) = with_refinement(even(n), tol, |n| {
        let n = even(n);
        let grid = Grid::new(Cell::Effective, n)?;
        let (nx, ny) = (grid.nx(), grid.ny());
        let mid = ny / 2;
        let mut frames = Vec::with_capacity(grid.node_count());
        for j in 0..=ny {
            for i in 0..=nx {
                frames.push(model.occupied_frame(grid.node_k(i, j), tol)?);
            }
        }
        // Kramers-normalize the four invariant momenta on S.
        for (node, lambda) in [
            ((0usize, mid), [0i64, 0]),
            ((0, 0), [0, -1]),
            ((nx, 0), [1, -1]),
            ((nx, mid), [1, 0]),
        ] {
            let idx = grid.index(node.0, node.1);
            frames[idx] = frame::kramers_normalize_at(model, lambda, &frames[idx], tol)?;
        }
        // Upper halves of the vertical edges are the time-reversal images
        // of the lower halves.
        let tau1 = model.tau_lambda([1, 0]);
        for j in mid + 1..ny {
            let image = model.theta_frame(&frames[grid.index(0, ny - j)])? * &eps;
            frames[grid.index(0, j)] = image;
            let image = &tau1 * (model.theta_frame(&frames[grid.index(nx, ny - j)])? * &eps);
            frames[grid.index(nx, j)] = image;
        }
        // Top edge is the translate of the bottom edge.
        let tau2 = model.tau_lambda([0, 1]);
        for i in 0..=nx {
            frames[grid.index(i, ny)] = &tau2 * &frames[grid.index(i, 0)];
        }
        // Corner consistency of the two rules, guaranteed by the Kramers
        // normalization of the bottom vertices.
        for (i, lam) in [(0usize, None), (nx, Some(&tau1))] {
            let direct = model.theta_frame(&frames[grid.index(i, 0)])? * &eps;
            let direct = match lam {
                Some(t) => t * direct,
                None => direct,
            };
            let mismatch = linalg::frob(&(&frames[grid.index(i, ny)] - direct));
            if mismatch > 1e-6 {
                return Err(Error::TrsInconsistent(format!(
                    "constrained boundary gauge tears at a corner (residual {mismatch:.3e})"
                )));
            }
        }
        let flux = plaquette_phase_sum(|i, j| frames[grid.index(i, j)].clone(), nx, ny)?;
        // Boundary Wilson line of the constrained gauge. Links touching a
        // normalized vertex legitimately carry large phases, so no
        // admissibility guard here; the branch integers they contribute
        // are exactly what the parity counts.
        let ij = grid.boundary_nodes();
        let mut connection = 0.0;
        for w in ij.windows(2) {
            let a = &frames[grid.index(w[0].0, w[0].1)];
            let b = &frames[grid.index(w[1].0, w[1].1)];
            connection += (a.adjoint() * b).determinant().arg();
        }
        let raw = (flux - connection) / TAU;
        let nearest = raw.round();
        let residual = (raw - nearest).abs();
        if residual >= tol.snap {
            return Err(Error::SnapFailed { raw, residual });
        }
        Ok((raw, (nearest as i64).rem_euclid(2), residual))
    })?;
    Ok(InvariantResult {
        method: Method::FkmLattice,
        raw,
        value,
        snap_residual: residual,
        grid_n,
        refinements,
    })
}
