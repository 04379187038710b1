//! Obstruction unitaries at the cell vertices and the tau-equivariant
//! boundary frame on the full unit cell.

use super::{BoundaryFrames, Cell, FrameGrid, FramePath, ObstructionSet};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEig};
use crate::model::BlochModel;

/// Obstruction unitaries at `v2` and `v4`: the gauges relating the input
/// frame to the tau-translates of the base-vertex frame,
/// `tau_{e1} Psi(v1) = Psi(v2) <| U_obs(v2)` and
/// `tau_{e2} Psi(v1) = Psi(v4) <| U_obs(v4)`.
pub fn obstruction_chern(
    model: &BlochModel,
    psi: &FrameGrid,
    tol: &Tolerances,
) -> Result<ObstructionSet> {
    if psi.grid.cell != Cell::Full {
        return Err(Error::Invalid(
            "vertex obstructions live on the full unit cell".into(),
        ));
    }
    let grid = &psi.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let base = psi.frame(0, 0);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut u_obs = Vec::new();
    let mut logs = Vec::new();
    for (label, frame_here, lambda, k) in [
        ("v2", psi.frame(nx, 0), [1i64, 0], grid.node_k(nx, 0)),
        ("v4", psi.frame(0, ny), [0, 1], grid.node_k(0, ny)),
    ] {
        let translated = model.tau_lambda(lambda) * base;
        let (u, _) = linalg::overlap_gauge(frame_here, &translated, tol)?;
        logs.push(linalg::principal_log_unitary(&u, tol)?);
        u_obs.push(u);
        points.push(k);
        labels.push(label.to_string());
    }
    Ok(ObstructionSet {
        points,
        labels,
        u_obs,
        logs,
        compat_residuals: Vec::new(),
    })
}

/// Tau-equivariant boundary frame on the full cell and the residual gauge
/// relating it to the input frame.
///
/// The four edges carry the interpolants `e^{i (2 k + 1) T / 2}` of the
/// vertex obstruction logs; opposite edges are tau-translates of each
/// other by construction, and the junction residual reports how well the
/// independent formulas meet at the vertices (the `v3` compatibility
/// chain in particular).
pub fn boundary_frame_chern(
    model: &BlochModel,
    psi: &FrameGrid,
    obstructions: &ObstructionSet,
    tol: &Tolerances,
) -> Result<BoundaryFrames> {
    if psi.grid.cell != Cell::Full {
        return Err(Error::Invalid(
            "the tau-equivariant boundary frame lives on the full unit cell".into(),
        ));
    }
    let grid = &psi.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (_, log_v2) = obstructions
        .by_label("v2")
        .ok_or_else(|| Error::Invalid("obstruction set lacks v2".into()))?;
    let (_, log_v4) = obstructions
        .by_label("v4")
        .ok_or_else(|| Error::Invalid("obstruction set lacks v4".into()))?;
    let t2 = HermitianEig::new(&log_v2.t, tol)?;
    let t4 = HermitianEig::new(&log_v4.t, tol)?;
    let tau1 = model.tau_lambda([1, 0]);
    let tau2 = model.tau_lambda([0, 1]);

    let path = grid.boundary_path();
    let ij = grid.boundary_nodes();
    let mut phi_frames = Vec::with_capacity(ij.len());
    for &(i, j) in &ij {
        let k = grid.node_k(i, j);
        let frame = if j == 0 {
            // Bottom edge.
            psi.frame(i, 0) * t2.exp_i((2.0 * k[0] + 1.0) / 2.0)
        } else if j == ny {
            // Top edge: tau_{e2} image of the bottom formula.
            &tau2 * psi.frame(i, 0) * t2.exp_i((2.0 * k[0] + 1.0) / 2.0)
        } else if i == nx {
            // Right edge: tau_{e1} image of the left formula.
            &tau1 * psi.frame(0, j) * t4.exp_i((2.0 * k[1] + 1.0) / 2.0)
        } else {
            // Left edge.
            psi.frame(0, j) * t4.exp_i((2.0 * k[1] + 1.0) / 2.0)
        };
        phi_frames.push(frame);
    }

    // Independent-formula mismatches at the vertices. At v2 and v4 the
    // edge interpolants must land on the obstruction unitaries; at v3 the
    // two translated formulas must agree through the commutation of tau.
    let u2 = &obstructions.u_obs[obstructions.labels.iter().position(|l| l == "v2").unwrap()];
    let u4 = &obstructions.u_obs[obstructions.labels.iter().position(|l| l == "v4").unwrap()];
    let mut junction_residual: f64 = 0.0;
    {
        let bottom_end = psi.frame(nx, 0) * t2.exp_i(1.0);
        let right_start = &tau1 * psi.frame(0, 0) * t4.exp_i(0.0);
        junction_residual = junction_residual.max(linalg::frob(&(&bottom_end - &right_start)));
        let left_end = psi.frame(0, ny) * t4.exp_i(1.0);
        let top_start = &tau2 * psi.frame(0, 0) * t2.exp_i(0.0);
        junction_residual = junction_residual.max(linalg::frob(&(&left_end - &top_start)));
        let v3_right = &tau1 * (psi.frame(0, ny) * u4);
        let v3_top = &tau2 * (psi.frame(nx, 0) * u2);
        junction_residual = junction_residual.max(linalg::frob(&(&v3_right - &v3_top)));
    }

    let mut gauge = Vec::with_capacity(ij.len());
    for (pos, &(i, j)) in ij.iter().enumerate() {
        let (u, _) = linalg::overlap_gauge(psi.frame(i, j), &phi_frames[pos], tol)?;
        gauge.push(u);
    }
    Ok(BoundaryFrames {
        phi: FramePath {
            path,
            frames: phi_frames,
        },
        gauge,
        junction_residual,
    })
}
