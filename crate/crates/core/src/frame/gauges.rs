//! Random gauge transformations with prescribed symmetry, for the
//! degree-parity property checks.
//!
//! A gauge loop `X` on the full-cell boundary that takes equal values on
//! translation-identified nodes has determinant winding zero; a gauge
//! loop on the effective-cell boundary satisfying both the translation
//! and the time-reversal compatibility conditions has even winding. The
//! generators here produce structured random samples of both families.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::{DiscretePath, Grid};
use crate::config::Tolerances;
use crate::error::Result;
use crate::linalg::{self, CMatrix};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_complex(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let tol = Tolerances::default();
    linalg::loewdin_frame(&random_complex(rng, n, n), &tol)
        .expect("a generic random matrix is full rank")
}

/// Scalar profile on the full-cell boundary that takes equal values at
/// translation-identified nodes: one profile for the pair of horizontal
/// edges, one for the vertical pair, pinned to a common corner value.
struct EdgeProfile {
    corner: f64,
    horizontal: [f64; 3],
    vertical: [f64; 3],
}

impl EdgeProfile {
    fn random(rng: &mut ChaCha8Rng, amplitude: f64) -> Self {
        let coeffs = |rng: &mut ChaCha8Rng| {
            [
                rng.random_range(-amplitude..amplitude),
                rng.random_range(-amplitude..amplitude),
                rng.random_range(-amplitude..amplitude),
            ]
        };
        let horizontal = coeffs(rng);
        let vertical = coeffs(rng);
        EdgeProfile {
            corner: rng.random_range(-amplitude..amplitude),
            horizontal,
            vertical,
        }
    }

    fn eval(&self, k: [f64; 2]) -> f64 {
        // Vanishing basis at the edge endpoints keeps all four corners at
        // the shared value.
        let bump = |coeffs: &[f64; 3], s: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * ((n + 1) as f64 * PI * (s + 0.5)).sin())
                .sum()
        };
        if (k[1].abs() - 0.5).abs() < 1e-9 {
            self.corner + bump(&self.horizontal, k[0])
        } else {
            self.corner + bump(&self.vertical, k[1])
        }
    }
}

/// Random smooth gauge loop on the full-cell boundary with
/// `X(k + lambda) = X(k)` at identified nodes.
pub fn random_periodic_gauge(
    m: usize,
    boundary: &DiscretePath,
    seed: u64,
) -> Vec<CMatrix> {
    let mut rng = rng_from_seed(seed);
    let profiles: Vec<(EdgeProfile, CMatrix)> = (0..2)
        .map(|_| (EdgeProfile::random(&mut rng, 1.2), random_hermitian(&mut rng, m)))
        .collect();
    let tol = Tolerances::default();
    boundary
        .nodes
        .iter()
        .map(|&k| {
            let mut gen = CMatrix::zeros(m, m);
            for (profile, h) in &profiles {
                gen += h.scale(profile.eval(k));
            }
            linalg::exp_i_hermitian(&gen, 1.0, &tol).expect("generator is Hermitian")
        })
        .collect()
}

/// Hermitian generator of the unitary-symplectic group for `eps`:
/// projects a random Hermitian onto `{H : H^T eps = -eps H}`, so that
/// `exp(iH)` satisfies `X^T eps X = eps`.
pub fn random_symplectic_generator(rng: &mut ChaCha8Rng, eps: &CMatrix) -> CMatrix {
    let m = eps.nrows();
    let h = random_hermitian(rng, m);
    let eps_inv = eps.adjoint();
    let twisted = &eps_inv * h.transpose() * eps;
    ((&h - twisted) * Complex64::new(0.5, 0.0)).clone()
}

/// Random gauge loop on the effective-cell boundary satisfying both
/// compatibility conditions: `X(k + lambda) = X(k)` and
/// `X(-k + lambda)^T eps X(k) = eps`. Generated freely on the lower-left
/// path `S` (symplectic values at the invariant momenta, unconstrained
/// wiggle in between) and reflected onto the remaining edges.
pub fn random_symmetric_gauge(
    grid: &Grid,
    eps: &CMatrix,
    seed: u64,
) -> Result<Vec<CMatrix>> {
    let mut rng = rng_from_seed(seed);
    let m = eps.nrows();
    let tol = Tolerances::default();
    // Symplectic endpoint generators at the four invariant momenta of S.
    let ends: Vec<CMatrix> = (0..4)
        .map(|_| random_symplectic_generator(&mut rng, eps).scale(1.5))
        .collect();
    let free: Vec<CMatrix> = (0..3).map(|_| random_hermitian(&mut rng, m).scale(1.0)).collect();

    let (nx, ny) = (grid.nx(), grid.ny());
    let mid = ny / 2;
    // X on S by segment parameter.
    let s_value = |i: usize, j: usize| -> Result<CMatrix> {
        let k = grid.node_k(i, j);
        let (seg, s) = if i == 0 && j <= mid {
            (0usize, -2.0 * k[1])
        } else if j == 0 {
            (1, 2.0 * k[0])
        } else {
            (2, 2.0 * k[1] + 1.0)
        };
        let gen = ends[seg].scale(1.0 - s) + ends[seg + 1].scale(s) + free[seg].scale((PI * s).sin());
        linalg::exp_i_hermitian(&gen, 1.0, &tol)
    };
    let reflect = |x: &CMatrix| -> CMatrix {
        // X(-k + lambda) = eps^{-1} conj(X(k)) eps for unitary X.
        eps.adjoint() * x.map(|z| z.conj()) * eps
    };

    let mut out = Vec::new();
    for &(i, j) in &grid.boundary_nodes() {
        let x = if (i == 0 && j <= mid) || j == 0 || (i == nx && j <= mid) {
            s_value(i, j)?
        } else if i == nx {
            reflect(&s_value(nx, ny - j)?)
        } else if j == ny {
            s_value(i, 0)?
        } else {
            reflect(&s_value(0, ny - j)?)
        };
        out.push(x);
    }
    Ok(out)
}

/// Random smooth unitary field over a cell grid, periodic with period 1
/// in both momentum components (a valid re-gauging of any input frame
/// field).
pub fn random_periodic_grid_gauge(m: usize, grid: &Grid, seed: u64) -> Vec<CMatrix> {
    let mut rng = rng_from_seed(seed);
    let tol = Tolerances::default();
    let waves: Vec<([i32; 2], f64, f64, CMatrix)> = [[1, 0], [0, 1], [1, 1], [2, -1]]
        .iter()
        .map(|&pq| {
            (
                pq,
                rng.random_range(-0.8..0.8),
                rng.random_range(0.0..2.0 * PI),
                random_hermitian(&mut rng, m),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(grid.node_count());
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            let k = grid.node_k(i, j);
            let mut gen = CMatrix::zeros(m, m);
            for (pq, amp, phase, h) in &waves {
                let arg = 2.0 * PI * (pq[0] as f64 * k[0] + pq[1] as f64 * k[1]) + phase;
                gen += h.scale(amp * arg.cos());
            }
            out.push(linalg::exp_i_hermitian(&gen, 1.0, &tol).expect("generator is Hermitian"));
        }
    }
    out
}
