//! Bloch-Hamiltonian families and Fermi projectors.
//!
//! A [`BlochModel`] is a finite hopping list `H(k) = sum_R e^{2 pi i k.R} H_R`
//! over the integer lattice, together with its symmetry data: the lattice
//! representation `tau` (identity in the periodic gauge) and, optionally,
//! a fermionic time-reversal operator `Theta = U_Theta K` with its
//! reshuffling matrix `epsilon`. Momenta are always in lattice coordinates
//! `k = k_1 e_1 + k_2 e_2`.

mod builtins;
mod io;

pub use builtins::{atomic_insulator, haldane, kane_mele, two_band_winding};
pub use io::{load_model, model_from_json, model_to_json, save_model};

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Fermionic time-reversal data: `Theta = U_Theta` followed by complex
/// conjugation, with `U_Theta conj(U_Theta) = -1`, plus the unitary
/// skew-symmetric reshuffling matrix acting on occupied frames.
#[derive(Debug, Clone)]
pub struct TrsData {
    pub u_theta: CMatrix,
    pub epsilon: CMatrix,
}

/// Tight-binding Bloch-Hamiltonian family with symmetry data.
#[derive(Debug, Clone)]
pub struct BlochModel {
    name: String,
    n: usize,
    m: usize,
    hoppings: Vec<([i64; 2], CMatrix)>,
    lattice_basis: [[f64; 2]; 2],
    tau: Option<[CMatrix; 2]>,
    trs: Option<TrsData>,
}

/// Fermi projector at one momentum, with its spectral-gap certificate.
#[derive(Debug, Clone)]
pub struct ProjectorSample {
    /// Momentum in lattice coordinates.
    pub k: [f64; 2],
    /// Rank-`m` orthogonal projector onto the occupied bands.
    pub p: CMatrix,
    /// `E_{m+1}(k) - E_m(k)`.
    pub gap: f64,
    pub occupied_energies: Vec<f64>,
}

/// Residual report from [`BlochModel::verify_symmetries`].
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub grid_n: usize,
    /// Max `||H(k) - H(k)^dagger||` over the grid.
    pub hermiticity: f64,
    /// Max `||P(k+lambda) - tau_lambda P(k) tau_lambda^{-1}||` over the
    /// grid and both lattice generators.
    pub covariance: f64,
    /// Max `||P(-k) - Theta P(k) Theta^{-1}||`; absent without
    /// time-reversal data.
    pub trs: Option<f64>,
    pub pass: bool,
}

const SYMMETRY_PASS: f64 = 1e-8;

impl BlochModel {
    /// Validates and assembles a model.
    ///
    /// Checks: hopping matrices square of size `n`, finite, paired so that
    /// `H_{-R} = H_R^dagger`; `tau` unitary and commuting; time-reversal
    /// data satisfying `U_Theta conj(U_Theta) = -1`, `epsilon` unitary
    /// skew-symmetric of size `m`, `m` even, and the compatibility
    /// `Theta tau_lambda = tau_lambda^{-1} Theta`.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        m: usize,
        hoppings: Vec<([i64; 2], CMatrix)>,
        lattice_basis: [[f64; 2]; 2],
        tau: Option<[CMatrix; 2]>,
        trs: Option<TrsData>,
    ) -> Result<Self> {
        if n == 0 || m == 0 || m >= n {
            return Err(Error::Invalid(format!(
                "band counts must satisfy 0 < m < n, got n = {n}, m = {m}"
            )));
        }
        if hoppings.is_empty() {
            return Err(Error::ParseError("empty hopping list".into()));
        }
        let mut sorted = hoppings;
        sorted.sort_by_key(|(r, _)| *r);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!(
                    "duplicate hopping block at R = ({}, {})",
                    w[0].0[0], w[0].0[1]
                )));
            }
        }
        for (r, h) in &sorted {
            if h.nrows() != n || h.ncols() != n {
                return Err(Error::Invalid(format!(
                    "hopping block at R = ({}, {}) is {}x{}, expected {n}x{n}",
                    r[0],
                    r[1],
                    h.nrows(),
                    h.ncols()
                )));
            }
            if !h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Invalid(format!(
                    "hopping block at R = ({}, {}) has non-finite entries",
                    r[0], r[1]
                )));
            }
            let minus = [-r[0], -r[1]];
            let partner = sorted.iter().find(|(s, _)| *s == minus);
            let ok = match partner {
                Some((_, g)) => {
                    linalg::frob(&(g.adjoint() - h)) <= 1e-12 * linalg::frob(h).max(1.0)
                }
                None => false,
            };
            if !ok {
                return Err(Error::HermiticityViolation(r[0], r[1]));
            }
        }
        if let Some([t1, t2]) = &tau {
            for t in [t1, t2] {
                if t.nrows() != n || t.ncols() != n {
                    return Err(Error::Invalid("tau matrices must be n x n".into()));
                }
                let res = linalg::unitarity_residual(t);
                if res > 1e-10 {
                    return Err(Error::Invalid(format!(
                        "tau matrix is not unitary (residual {res:.3e})"
                    )));
                }
            }
            let comm = linalg::frob(&(t1 * t2 - t2 * t1));
            if comm > 1e-10 {
                return Err(Error::Invalid(format!(
                    "tau generators do not commute (residual {comm:.3e})"
                )));
            }
        }
        if let Some(data) = &trs {
            if m % 2 != 0 {
                return Err(Error::TrsInconsistent(
                    "occupied band count m must be even under fermionic time reversal".into(),
                ));
            }
            if data.u_theta.nrows() != n || data.u_theta.ncols() != n {
                return Err(Error::TrsInconsistent("u_theta must be n x n".into()));
            }
            if linalg::unitarity_residual(&data.u_theta) > 1e-10 {
                return Err(Error::TrsInconsistent("u_theta is not unitary".into()));
            }
            let square = &data.u_theta * data.u_theta.map(|z| z.conj());
            if linalg::frob(&(square + linalg::ident(n))) > 1e-10 {
                return Err(Error::TrsInconsistent(
                    "u_theta conj(u_theta) != -1 (Theta^2 must be -1)".into(),
                ));
            }
            if data.epsilon.nrows() != m || data.epsilon.ncols() != m {
                return Err(Error::TrsInconsistent("epsilon must be m x m".into()));
            }
            if linalg::unitarity_residual(&data.epsilon) > 1e-10 {
                return Err(Error::TrsInconsistent("epsilon is not unitary".into()));
            }
            if linalg::frob(&(data.epsilon.transpose() + &data.epsilon)) > 1e-10 {
                return Err(Error::TrsInconsistent("epsilon is not skew-symmetric".into()));
            }
            if let Some([t1, t2]) = &tau {
                // Theta tau = tau^{-1} Theta, i.e. U conj(tau) = tau^dagger U.
                for t in [t1, t2] {
                    let lhs = &data.u_theta * t.map(|z| z.conj());
                    let rhs = t.adjoint() * &data.u_theta;
                    if linalg::frob(&(lhs - rhs)) > 1e-10 {
                        return Err(Error::TrsInconsistent(
                            "tau and Theta violate Theta tau = tau^{-1} Theta".into(),
                        ));
                    }
                }
            }
        }
        Ok(BlochModel {
            name: name.into(),
            n,
            m,
            hoppings: sorted,
            lattice_basis,
            tau,
            trs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Total band count.
    pub fn bands(&self) -> usize {
        self.n
    }

    /// Occupied band count.
    pub fn occupied(&self) -> usize {
        self.m
    }

    pub fn lattice_basis(&self) -> [[f64; 2]; 2] {
        self.lattice_basis
    }

    pub fn hoppings(&self) -> &[([i64; 2], CMatrix)] {
        &self.hoppings
    }

    pub fn trs(&self) -> Option<&TrsData> {
        self.trs.as_ref()
    }

    pub fn has_trs(&self) -> bool {
        self.trs.is_some()
    }

    /// Reshuffling matrix, or [`Error::NoTrs`].
    pub fn epsilon(&self) -> Result<&CMatrix> {
        self.trs.as_ref().map(|d| &d.epsilon).ok_or(Error::NoTrs)
    }

    /// Bloch Hamiltonian at `k` (lattice coordinates).
    pub fn hamiltonian(&self, k: [f64; 2]) -> CMatrix {
        let mut h = CMatrix::zeros(self.n, self.n);
        for (r, block) in &self.hoppings {
            let phase = Complex64::from_polar(1.0, TAU * (k[0] * r[0] as f64 + k[1] * r[1] as f64));
            h.zip_apply(block, |acc, b| *acc += phase * b);
        }
        h
    }

    /// `tau_lambda` for an integer lattice vector; identity in the
    /// periodic gauge.
    pub fn tau_lambda(&self, lambda: [i64; 2]) -> CMatrix {
        match &self.tau {
            None => linalg::ident(self.n),
            Some([t1, t2]) => {
                let mut out = linalg::ident(self.n);
                for (gen, count) in [(t1, lambda[0]), (t2, lambda[1])] {
                    let step = if count >= 0 { gen.clone() } else { gen.adjoint() };
                    for _ in 0..count.unsigned_abs() {
                        out = &out * &step;
                    }
                }
                out
            }
        }
    }

    /// True in the periodic gauge (no stored `tau`), where all
    /// `tau_lambda` are the identity.
    pub fn periodic_gauge(&self) -> bool {
        self.tau.is_none()
    }

    /// Apply `Theta = U_Theta K` componentwise to a frame (or any matrix
    /// of column vectors).
    pub fn theta_frame(&self, frame: &CMatrix) -> Result<CMatrix> {
        let data = self.trs.as_ref().ok_or(Error::NoTrs)?;
        Ok(&data.u_theta * frame.map(|z| z.conj()))
    }

    /// Conjugation `Theta A Theta^{-1} = U_Theta conj(A) U_Theta^dagger`.
    pub fn theta_conjugate(&self, a: &CMatrix) -> Result<CMatrix> {
        let data = self.trs.as_ref().ok_or(Error::NoTrs)?;
        Ok(&data.u_theta * a.map(|z| z.conj()) * data.u_theta.adjoint())
    }

    /// Full eigensystem of `H(k)`, eigenvalues ascending.
    pub fn eigensystem(&self, k: [f64; 2], tol: &Tolerances) -> Result<(Vec<f64>, CMatrix)> {
        linalg::hermitian_eig(&self.hamiltonian(k), tol)
    }

    /// Orthonormal frame of the `m` lowest eigenvectors, with the gap
    /// certificate enforced.
    pub fn occupied_frame(&self, k: [f64; 2], tol: &Tolerances) -> Result<CMatrix> {
        let (values, vectors) = self.eigensystem(k, tol)?;
        let gap = values[self.m] - values[self.m - 1];
        if gap <= tol.gap {
            return Err(Error::GapClosed { k1: k[0], k2: k[1], gap });
        }
        Ok(vectors.columns(0, self.m).into_owned())
    }

    /// Fermi projector onto the `m` lowest bands.
    pub fn fermi_projector(&self, k: [f64; 2], tol: &Tolerances) -> Result<ProjectorSample> {
        let (values, vectors) = self.eigensystem(k, tol)?;
        let gap = values[self.m] - values[self.m - 1];
        if gap <= tol.gap {
            return Err(Error::GapClosed { k1: k[0], k2: k[1], gap });
        }
        let occ = vectors.columns(0, self.m);
        let p = &occ * occ.adjoint();
        Ok(ProjectorSample {
            k,
            p,
            gap,
            occupied_energies: values[..self.m].to_vec(),
        })
    }

    /// Max residuals of lattice covariance (P2) and, when present,
    /// time-reversal symmetry (P3) of the Fermi projector over an
    /// `N x N` momentum grid.
    pub fn verify_symmetries(&self, grid_n: usize, tol: &Tolerances) -> Result<SymmetryReport> {
        let mut hermiticity: f64 = 0.0;
        let mut covariance: f64 = 0.0;
        let mut trs_res: f64 = 0.0;
        for i in 0..grid_n {
            for j in 0..grid_n {
                let k = [
                    -0.5 + i as f64 / grid_n as f64,
                    -0.5 + j as f64 / grid_n as f64,
                ];
                let h = self.hamiltonian(k);
                hermiticity = hermiticity.max(linalg::frob(&(&h - h.adjoint())));
                let p = self.fermi_projector(k, tol)?.p;
                for lambda in [[1i64, 0], [0, 1]] {
                    let shifted = self
                        .fermi_projector([k[0] + lambda[0] as f64, k[1] + lambda[1] as f64], tol)?
                        .p;
                    let tau = self.tau_lambda(lambda);
                    let moved = &tau * &p * tau.adjoint();
                    covariance = covariance.max(linalg::frob(&(shifted - moved)));
                }
                if self.trs.is_some() {
                    let reflected = self.fermi_projector([-k[0], -k[1]], tol)?.p;
                    let moved = self.theta_conjugate(&p)?;
                    trs_res = trs_res.max(linalg::frob(&(reflected - moved)));
                }
            }
        }
        let trs = self.trs.as_ref().map(|_| trs_res);
        let pass = covariance < SYMMETRY_PASS && trs.map_or(true, |r| r < SYMMETRY_PASS);
        Ok(SymmetryReport {
            grid_n,
            hermiticity,
            covariance,
            trs,
            pass,
        })
    }

    /// Replace the lattice representation (exercises the general-gauge
    /// code paths; the hoppings must actually commute with `tau` for the
    /// result to stay covariant).
    pub fn with_tau(mut self, tau: [CMatrix; 2]) -> Result<Self> {
        let hoppings = std::mem::take(&mut self.hoppings);
        BlochModel::new(
            self.name.clone(),
            self.n,
            self.m,
            hoppings,
            self.lattice_basis,
            Some(tau),
            self.trs.clone(),
        )
    }

    /// Overwrite one entry of one hopping block, bypassing validation
    /// (test fixture for symmetry-violation reporting).
    pub fn corrupt_hopping(&mut self, index: usize, entry: (usize, usize), value: Complex64) {
        let block = &mut self.hoppings[index].1;
        block[entry] = value;
    }
}

/// Diagonal matrix from real values.
pub(crate) fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

#[cfg(test)]
mod tests;
