//! Obstruction unitaries at the time-reversal invariant momenta and the
//! symmetric boundary frame on the effective half cell.

use super::{BoundaryFrames, Cell, DiscretePath, FrameGrid, FramePath, ObstructionSet};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEig};
use crate::model::BlochModel;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// The four time-reversal invariant momenta on the lower-left boundary
/// path `S`, in traversal order, with their defining lattice vectors
/// `lambda = 2 k`.
const TRIM_S: [(&str, [f64; 2], [i64; 2]); 4] = [
    ("v1", [0.0, 0.0], [0, 0]),
    ("v2", [0.0, -0.5], [0, -1]),
    ("v3", [0.5, -0.5], [1, -1]),
    ("v4", [0.5, 0.0], [1, 0]),
];

fn epsilon_compat_residual(u: &CMatrix, eps: &CMatrix) -> f64 {
    linalg::frob(&(u.transpose() * eps - eps * u))
}

/// Obstruction unitaries at the four momenta on `S`, defined by
/// `Theta Psi(k) <| eps = tau_lambda Psi(k) <| U_obs(k)`, together with
/// their principal logarithms.
///
/// Each unitary must satisfy the self-compatibility
/// `U_obs^T eps = eps U_obs`; a violation beyond `tol.gauge` means the
/// model's time-reversal data is broken and fails with
/// [`Error::CompatViolated`].
pub fn obstruction_trs(
    model: &BlochModel,
    psi: &FrameGrid,
    tol: &Tolerances,
) -> Result<ObstructionSet> {
    if psi.grid.cell != Cell::Effective {
        return Err(Error::Invalid(
            "time-reversal obstructions live on the effective cell".into(),
        ));
    }
    let eps = model.epsilon()?.clone();
    let grid = &psi.grid;
    let (nx, mid) = (grid.nx(), grid.ny() / 2);
    let node_of = |k: [f64; 2]| -> (usize, usize) {
        let i = if k[0] > 0.25 { nx } else { 0 };
        let j = if k[1] < -0.25 { 0 } else { mid };
        (i, j)
    };
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut u_obs = Vec::new();
    let mut logs = Vec::new();
    let mut compat = Vec::new();
    for (label, k, lambda) in TRIM_S {
        let (i, j) = node_of(k);
        let frame = psi.frame(i, j);
        let translated = model.tau_lambda(lambda) * frame;
        let reflected = model.theta_frame(frame)? * &eps;
        let (u, _) = linalg::overlap_gauge(&translated, &reflected, tol)?;
        let residual = epsilon_compat_residual(&u, &eps);
        if residual > tol.gauge {
            return Err(Error::CompatViolated { residual });
        }
        logs.push(linalg::principal_log_unitary(&u, tol)?);
        u_obs.push(u);
        compat.push(residual);
        points.push(k);
        labels.push(label.to_string());
    }
    Ok(ObstructionSet {
        points,
        labels,
        u_obs,
        logs,
        compat_residuals: compat,
    })
}

/// Interpolated gauge `V(k)` on the path `S`: between consecutive
/// invariant momenta the obstruction logs are blended linearly,
/// `V = exp(i [(1 - s) T_a + s T_b] / 2)`, so `V(k_lambda)^2 = U_obs(k_lambda)`
/// at every one of the four momenta.
struct SInterpolant {
    logs: [CMatrix; 4],
}

impl SInterpolant {
    fn new(obstructions: &ObstructionSet) -> Result<Self> {
        let mut logs = Vec::with_capacity(4);
        for (label, _, _) in TRIM_S {
            let (_, l) = obstructions
                .by_label(label)
                .ok_or_else(|| Error::Invalid(format!("obstruction set lacks {label}")))?;
            logs.push(l.t.clone());
        }
        Ok(SInterpolant {
            logs: logs.try_into().map_err(|_| Error::Invalid("bad obstruction set".into()))?,
        })
    }

    /// `V` at a node of `S`; panics if `k` is not on `S` within 1e-9.
    fn at(&self, k: [f64; 2], tol: &Tolerances) -> Result<CMatrix> {
        let (seg, s) = if k[0].abs() < 1e-9 && k[1] <= 1e-9 {
            (0, -2.0 * k[1])
        } else if (k[1] + 0.5).abs() < 1e-9 {
            (1, 2.0 * k[0])
        } else if (k[0] - 0.5).abs() < 1e-9 && k[1] <= 1e-9 {
            (2, 2.0 * k[1] + 1.0)
        } else {
            return Err(Error::Invalid(format!(
                "momentum ({}, {}) is not on the path S",
                k[0], k[1]
            )));
        };
        let combo = self.logs[seg].scale(1.0 - s) + self.logs[seg + 1].scale(s);
        linalg::exp_i_hermitian(&combo, 0.5, tol)
    }
}

/// Symmetric boundary frame on the effective cell: `Psi <| V` on `S`, and
/// the time-reversal / translation images of it on the remaining three
/// boundary pieces. The junction residual reports the mismatch of the
/// independent branch formulas at the four invariant momenta where two
/// branches meet.
pub fn boundary_frame_trs(
    model: &BlochModel,
    psi: &FrameGrid,
    obstructions: &ObstructionSet,
    tol: &Tolerances,
) -> Result<BoundaryFrames> {
    if psi.grid.cell != Cell::Effective {
        return Err(Error::Invalid(
            "the symmetric boundary frame lives on the effective cell".into(),
        ));
    }
    let eps = model.epsilon()?.clone();
    let grid = &psi.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let mid = ny / 2;
    let interp = SInterpolant::new(obstructions)?;
    let tau1_inv = model.tau_lambda([-1, 0]);
    let tau2 = model.tau_lambda([0, 1]);

    // Branch formulas, by grid node.
    let on_s = |i: usize, j: usize| (i == 0 && j <= mid) || j == 0 || (i == nx && j <= mid);
    let s_value = |i: usize, j: usize| -> Result<CMatrix> {
        let v = interp.at(grid.node_k(i, j), tol)?;
        Ok(psi.frame(i, j) * v)
    };
    // Right edge above k_e1: tau_{e1}^{-1} Theta Psi(1/2, -k2) <| (conj V) eps.
    let e4_value = |j: usize| -> Result<CMatrix> {
        let v = interp.at(grid.node_k(nx, ny - j), tol)?;
        let theta = model.theta_frame(psi.frame(nx, ny - j))?;
        Ok(&tau1_inv * theta * (v.map(|z| z.conj()) * &eps))
    };
    // Top edge: tau_{e2} Psi(k1, -1/2) <| V(k1, -1/2).
    let e5_value = |i: usize| -> Result<CMatrix> {
        let v = interp.at(grid.node_k(i, 0), tol)?;
        Ok(&tau2 * psi.frame(i, 0) * v)
    };
    // Left edge above v1: Theta Psi(0, -k2) <| (conj V) eps.
    let e6_value = |j: usize| -> Result<CMatrix> {
        let v = interp.at(grid.node_k(0, ny - j), tol)?;
        let theta = model.theta_frame(psi.frame(0, ny - j))?;
        Ok(theta * (v.map(|z| z.conj()) * &eps))
    };

    let path = grid.boundary_path();
    let ij = grid.boundary_nodes();
    let mut phi_frames = Vec::with_capacity(ij.len());
    for &(i, j) in &ij {
        let frame = if on_s(i, j) {
            s_value(i, j)?
        } else if i == nx {
            e4_value(j)?
        } else if j == ny {
            e5_value(i)?
        } else {
            e6_value(j)?
        };
        phi_frames.push(frame);
    }

    // Continuity of the independent formulas across the invariant momenta:
    // the chain at k_e1 and its mirror at v1, plus the two upper corners
    // where the translated and reflected branches meet.
    let mut junction_residual: f64 = 0.0;
    junction_residual = junction_residual.max(linalg::frob(&(s_value(nx, mid)? - e4_value(mid)?)));
    junction_residual = junction_residual.max(linalg::frob(&(s_value(0, mid)? - e6_value(mid)?)));
    junction_residual = junction_residual.max(linalg::frob(&(e4_value(ny)? - e5_value(nx)?)));
    junction_residual = junction_residual.max(linalg::frob(&(e5_value(0)? - e6_value(ny)?)));

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

/// Kramers-normalize a frame at an invariant momentum `k` with
/// `lambda = 2 k`: returns `frame <| e^{i T / 2}`, which satisfies
/// `Theta Phi <| eps = tau_lambda Phi` exactly (up to the compatibility
/// residual of the input data).
pub(crate) fn kramers_normalize_at(
    model: &BlochModel,
    lambda: [i64; 2],
    frame: &CMatrix,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let eps = model.epsilon()?;
    let translated = model.tau_lambda(lambda) * frame;
    let reflected = model.theta_frame(frame)? * eps;
    let (u, _) = linalg::overlap_gauge(&translated, &reflected, tol)?;
    let residual = epsilon_compat_residual(&u, eps);
    if residual > tol.gauge {
        return Err(Error::CompatViolated { residual });
    }
    let log = linalg::principal_log_unitary(&u, tol)?;
    Ok(frame * HermitianEig::new(&log.t, tol)?.exp_i(0.5))
}

/// The explicit unwinding gauge of even degree: on the right edge
/// `k1 = 1/2` it spins the first Kramers pair by `e^{-2 pi i r (k2 + 1/2)}`,
/// elsewhere it is the identity. Its determinant winds by exactly `-2r`
/// around the effective-cell boundary.
pub fn unwind_map(r: i64, boundary: &DiscretePath, m: usize) -> Result<Vec<CMatrix>> {
    if m < 2 {
        return Err(Error::Invalid("unwinding needs at least one Kramers pair".into()));
    }
    boundary.validate()?;
    let mut out = Vec::with_capacity(boundary.nodes.len());
    for &k in &boundary.nodes {
        let mut x = linalg::ident(m);
        if (k[0] - 0.5).abs() < 1e-9 {
            let phase = Complex64::from_polar(1.0, -TAU * r as f64 * (k[1] + 0.5));
            x[(0, 0)] = phase;
            x[(1, 1)] = phase;
        }
        out.push(x);
    }
    Ok(out)
}
