//! Dense complex linear algebra for small matrices (n up to ~64).
//!
//! Everything a boundary-frame computation needs: Hermitian
//! eigendecomposition, closest-orthonormal-frame (polar) factorization,
//! principal logarithms of unitaries and determinant-phase winding of
//! unitary loops. All functions are pure; matrices are plain
//! [`nalgebra::DMatrix`] values over `Complex64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Principal logarithm `T` of a unitary, with `U = exp(iT)`,
/// `T = T^dagger` and all eigenvalues of `T` in `(-pi, pi]`.
#[derive(Debug, Clone)]
pub struct HermitianLog {
    /// Hermitian generator, eigenvalues in `(-pi, pi]` (radians).
    pub t: CMatrix,
    /// Circular distance of the nearest eigenphase to the cut at `-pi`.
    pub branch_margin: f64,
}

/// Complex identity matrix.
pub fn ident(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn frob(m: &CMatrix) -> f64 {
    m.norm()
}

/// `||U^dagger U - 1||_F`, the unitarity residual.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    frob(&(u.adjoint() * u - ident(n)))
}

/// `||H - H^dagger||_F / max(1, ||H||_F)`, the relative Hermiticity residual.
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    frob(&(h - h.adjoint())) / frob(h).max(1.0)
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invalid("matrix contains NaN or Inf entries".into()))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted ascending and the matching orthonormal
/// eigenvector columns, so that `H V = V diag(lambda)`.
pub fn hermitian_eig(h: &CMatrix, tol: &Tolerances) -> Result<(Vec<f64>, CMatrix)> {
    check_finite(h)?;
    if h.nrows() != h.ncols() {
        return Err(Error::Invalid(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let residual = hermiticity_residual(h);
    if residual > tol.herm {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrize before decomposing so roundoff in the input cannot leak
    // a non-real eigenvalue into the solver.
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = h.nrows();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Closest orthonormal frame to `w` in Frobenius norm (the unitary polar
/// factor), preserving the column space.
pub fn loewdin_frame(w: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    check_finite(w)?;
    let svd = w
        .clone()
        .try_svd(true, true, f64::EPSILON, 100_000)
        .ok_or(Error::NoConvergence)?;
    let sigma_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if sigma_min <= tol.rank {
        return Err(Error::RankDeficient { sigma_min });
    }
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    Ok(u * v_t)
}

/// Precomputed eigendecomposition of a Hermitian matrix, for evaluating
/// `exp(i s T)` at many interpolation parameters `s` cheaply.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl HermitianEig {
    pub fn new(t: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let (values, vectors) = hermitian_eig(t, tol)?;
        Ok(HermitianEig { values, vectors })
    }

    /// `exp(i scale T)`.
    pub fn exp_i(&self, scale: f64) -> CMatrix {
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values
                .iter()
                .map(|&l| Complex64::from_polar(1.0, scale * l)),
        );
        let scaled = &self.vectors * CMatrix::from_diagonal(&phases);
        scaled * self.vectors.adjoint()
    }
}

/// `exp(i scale T)` for Hermitian `T`, via eigendecomposition (exact for
/// normal matrices; no series truncation).
pub fn exp_i_hermitian(t: &CMatrix, scale: f64, tol: &Tolerances) -> Result<CMatrix> {
    Ok(HermitianEig::new(t, tol)?.exp_i(scale))
}

/// Principal logarithm of a unitary matrix: `U = exp(iT)` with Hermitian
/// `T` and eigenphases in `(-pi, pi]`.
///
/// An eigenphase within `tol.branch` above the cut at `-pi` is rejected as
/// [`Error::BranchAmbiguous`] instead of silently picking a branch.
pub fn principal_log_unitary(u: &CMatrix, tol: &Tolerances) -> Result<HermitianLog> {
    check_finite(u)?;
    let residual = unitarity_residual(u);
    if residual > tol.unitary {
        return Err(Error::NotUnitary { residual });
    }
    let n = u.nrows();
    // A unitary is normal: its Hermitian and anti-Hermitian parts commute
    // and are simultaneously diagonalizable. A generic real combination of
    // the two has simple spectrum wherever U does, so its eigenbasis
    // diagonalizes U itself; the reconstruction check below catches the
    // non-generic combinations and retries with a different mixing weight.
    let h_re = (u + u.adjoint()).scale(0.5);
    let h_im = ((u - u.adjoint()) * Complex64::new(0.0, -0.5)).clone();
    for &c in &[0.618_033_988_749_895, 1.0 / 3.0_f64.sqrt(), 0.275_604_2] {
        let combo = &h_re + h_im.scale(c);
        let (_, vectors) = hermitian_eig(&combo, &loose_herm(tol))?;
        let m = vectors.adjoint() * u * &vectors;
        let phases: Vec<f64> = (0..n).map(|j| m[(j, j)].arg()).collect();
        let diag = DVector::from_iterator(n, phases.iter().map(|&p| Complex64::new(p, 0.0)));
        let t = &vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint();
        let t = (&t + t.adjoint()).scale(0.5);
        let reconstruction = exp_i_hermitian(&t, 1.0, tol)?;
        if frob(&(&reconstruction - u)) <= tol.exp {
            if let Some(&worst) = phases
                .iter()
                .filter(|&&p| p < -PI + tol.branch)
                .min_by(|a, b| a.total_cmp(b))
            {
                return Err(Error::BranchAmbiguous { margin: worst + PI });
            }
            let branch_margin = phases
                .iter()
                .map(|&p| PI - p.abs())
                .fold(f64::INFINITY, f64::min);
            return Ok(HermitianLog { t, branch_margin });
        }
    }
    Err(Error::NoConvergence)
}

fn loose_herm(tol: &Tolerances) -> Tolerances {
    // The mixed matrix (U + U^dagger)/2 + c (U - U^dagger)/2i inherits
    // roundoff of order tol.unitary from the input check, which is looser
    // than the default Hermiticity tolerance.
    Tolerances {
        herm: (10.0 * tol.unitary).max(tol.herm),
        ..tol.clone()
    }
}

/// Gauge transformation between two orthonormal frames spanning the same
/// subspace: `U_ab = <a_a, b_b>`, so that `b = a <| U` when the spans agree.
///
/// Returns the overlap matrix and its unitarity residual; the residual
/// exceeding `tol.gauge` means the spans differ.
pub fn overlap_gauge(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, f64)> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::Invalid(format!(
            "frame shapes differ: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let u = a.adjoint() * b;
    let residual = unitarity_residual(&u);
    if residual > tol.gauge {
        return Err(Error::SubspaceMismatch { residual });
    }
    Ok((u, residual))
}

/// Winding number of `det U` along a closed discrete loop of unitaries.
///
/// The loop must repeat its first element at the end. Each step must move
/// the determinant phase by less than `pi/2`, otherwise the discretization
/// is too coarse to trust and [`Error::StepTooLarge`] is returned. The
/// accumulated phase is snapped to the nearest integer multiple of `2 pi`.
pub fn det_phase_winding(loop_: &[CMatrix], tol: &Tolerances) -> Result<(i64, f64)> {
    if loop_.len() < 2 {
        return Err(Error::Invalid("winding needs at least two loop nodes".into()));
    }
    let first = &loop_[0];
    let last = &loop_[loop_.len() - 1];
    if frob(&(first - last)) > tol.gauge {
        return Err(Error::Invalid(
            "loop is not closed: first and last unitaries differ".into(),
        ));
    }
    let dets: Vec<Complex64> = loop_.iter().map(CMatrix::determinant).collect();
    for d in &dets {
        if (d.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::NotUnitary {
                residual: (d.norm() - 1.0).abs(),
            });
        }
    }
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for j in 0..dets.len() - 1 {
        let step = (dets[j + 1] * dets[j].conj()).arg();
        max_step = max_step.max(step.abs());
        total += step;
    }
    if max_step >= PI / 2.0 {
        return Err(Error::StepTooLarge { max_step });
    }
    let raw = total / (2.0 * PI);
    let degree = raw.round();
    let residual = (raw - degree).abs();
    if residual >= tol.snap {
        return Err(Error::SnapFailed { raw, residual });
    }
    Ok((degree as i64, max_step))
}

/// Raw (un-snapped) determinant-phase accumulation of a closed unitary
/// loop, in units of `2 pi`, together with the largest per-step phase.
pub fn det_phase_accumulation(loop_: &[CMatrix]) -> (f64, f64) {
    let dets: Vec<Complex64> = loop_.iter().map(CMatrix::determinant).collect();
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for j in 0..dets.len().saturating_sub(1) {
        let step = (dets[j + 1] * dets[j].conj()).arg();
        max_step = max_step.max(step.abs());
        total += step;
    }
    (total / (2.0 * PI), max_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = random_complex(rng, n, n);
        (&a + a.adjoint()).scale(0.5)
    }

    pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = random_complex(rng, n, n);
        loewdin_frame(&a, &tol()).expect("random matrix should be full rank")
    }

    #[test]
    fn eig_sigma_z() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let (vals, vecs) = hermitian_eig(&h, &tol()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        // Lowest eigenvector is (0, 1)^T, highest is (1, 0)^T, up to phase.
        assert!(vecs[(1, 0)].norm() > 1.0 - 1e-12);
        assert!(vecs[(0, 1)].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn eig_identity() {
        let h = ident(4);
        let (vals, vecs) = hermitian_eig(&h, &tol()).unwrap();
        assert!(vals.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        assert!(unitarity_residual(&vecs) < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let h = random_hermitian(&mut rng, 6);
            let (vals, vecs) = hermitian_eig(&h, &tol()).unwrap();
            let lambda = CMatrix::from_diagonal(&DVector::from_iterator(
                6,
                vals.iter().map(|&l| c(l, 0.0)),
            ));
            let rebuilt = &vecs * lambda * vecs.adjoint();
            assert!(frob(&(rebuilt - &h)) < 1e-12, "round trip above 1e-12");
            assert!(vals.windows(2).all(|w| w[0] <= w[1]), "not ascending");
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            hermitian_eig(&h, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn loewdin_fixes_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = random_complex(&mut rng, 5, 3);
        let q = loewdin_frame(&w, &tol()).unwrap();
        let again = loewdin_frame(&q, &tol()).unwrap();
        assert!(frob(&(&again - &q)) < 1e-12);
        let doubled = loewdin_frame(&q.scale(2.0), &tol()).unwrap();
        assert!(frob(&(&doubled - &q)) < 1e-12);
    }

    #[test]
    fn loewdin_orthonormal_and_same_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..8 {
            let w = random_complex(&mut rng, 4, 2);
            let f = loewdin_frame(&w, &tol()).unwrap();
            assert!(unitarity_residual(&f) < 1e-10);
            // Same span: compare projectors.
            let gram_inv = (w.adjoint() * &w).try_inverse().unwrap();
            let p_w = &w * gram_inv * w.adjoint();
            let p_f = &f * f.adjoint();
            assert!(frob(&(p_w - p_f)) < 1e-10);
        }
    }

    #[test]
    fn loewdin_rejects_rank_deficient() {
        let w = CMatrix::from_row_slice(
            3,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert!(matches!(
            loewdin_frame(&w, &tol()),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn log_identity() {
        let l = principal_log_unitary(&ident(3), &tol()).unwrap();
        assert!(frob(&l.t) < 1e-12);
        assert!((l.branch_margin - PI).abs() < 1e-12);
    }

    #[test]
    fn log_diagonal_phases() {
        let u = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from_polar(1.0, PI / 2.0),
            Complex64::from_polar(1.0, -PI / 2.0),
        ]));
        let l = principal_log_unitary(&u, &tol()).unwrap();
        let expected = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c(PI / 2.0, 0.0),
            c(-PI / 2.0, 0.0),
        ]));
        assert!(frob(&(&l.t - expected)) < 1e-12);
        assert!((l.branch_margin - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_round_trips_random_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2usize, 3, 5] {
            for _ in 0..6 {
                let t0 = {
                    // Rescale so the spectrum stays clear of the cut.
                    let h = random_hermitian(&mut rng, n);
                    let (vals, _) = hermitian_eig(&h, &tol()).unwrap();
                    let biggest = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                    h.scale(2.8 / biggest.max(1e-12))
                };
                let u = exp_i_hermitian(&t0, 1.0, &tol()).unwrap();
                let l = principal_log_unitary(&u, &tol()).unwrap();
                let spec_inside = hermitian_eig(&t0, &tol())
                    .unwrap()
                    .0
                    .iter()
                    .all(|&v| v.abs() < PI);
                if spec_inside {
                    assert!(frob(&(&l.t - &t0)) < 1e-10, "log round trip above 1e-10");
                }
                assert!(frob(&(exp_i_hermitian(&l.t, 1.0, &tol()).unwrap() - &u)) < 1e-10);
            }
        }
    }

    #[test]
    fn log_flags_branch_cut() {
        let u = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from_polar(1.0, -PI + 1e-8),
            c(1.0, 0.0),
        ]));
        assert!(matches!(
            principal_log_unitary(&u, &tol()),
            Err(Error::BranchAmbiguous { .. })
        ));
    }

    #[test]
    fn log_accepts_degenerate_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let v = random_unitary(&mut rng, 4);
        let phases = DVector::from_vec(vec![
            Complex64::from_polar(1.0, 1.2),
            Complex64::from_polar(1.0, 1.2),
            Complex64::from_polar(1.0, -0.7),
            Complex64::from_polar(1.0, 2.9),
        ]);
        let u = &v * CMatrix::from_diagonal(&phases) * v.adjoint();
        let l = principal_log_unitary(&u, &tol()).unwrap();
        assert!(frob(&(exp_i_hermitian(&l.t, 1.0, &tol()).unwrap() - &u)) < 1e-10);
    }

    #[test]
    fn overlap_of_equal_frames_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = loewdin_frame(&random_complex(&mut rng, 5, 2), &tol()).unwrap();
        let (u, res) = overlap_gauge(&a, &a, &tol()).unwrap();
        assert!(frob(&(&u - ident(2))) < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn overlap_recovers_gauge() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = loewdin_frame(&random_complex(&mut rng, 6, 3), &tol()).unwrap();
        let v = random_unitary(&mut rng, 3);
        let b = &a * &v;
        let (u, _) = overlap_gauge(&a, &b, &tol()).unwrap();
        assert!(frob(&(&u - &v)) < 1e-12);
    }

    #[test]
    fn overlap_of_same_plane_frames_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        // Two random orthonormal frames of the same random 2-plane in C^4.
        let w = random_complex(&mut rng, 4, 2);
        let a = loewdin_frame(&w, &tol()).unwrap();
        let b = &a * random_unitary(&mut rng, 2);
        let b = loewdin_frame(&b, &tol()).unwrap();
        let (u, res) = overlap_gauge(&a, &b, &tol()).unwrap();
        assert!(res < 1e-10);
        assert!(unitarity_residual(&u) < 1e-10);
    }

    #[test]
    fn overlap_detects_subspace_mismatch() {
        let a = CMatrix::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let b = CMatrix::from_row_slice(3, 1, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            overlap_gauge(&a, &b, &tol()),
            Err(Error::SubspaceMismatch { .. })
        ));
    }

    #[test]
    fn winding_constant_loop_is_zero() {
        let loop_: Vec<CMatrix> = (0..9).map(|_| ident(3)).collect();
        let (deg, _) = det_phase_winding(&loop_, &tol()).unwrap();
        assert_eq!(deg, 0);
    }

    #[test]
    fn winding_single_phase_turn() {
        let n = 32;
        let loop_: Vec<CMatrix> = (0..=n)
            .map(|j| {
                CMatrix::from_diagonal(&DVector::from_vec(vec![
                    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64),
                    c(1.0, 0.0),
                ]))
            })
            .collect();
        let (deg, max_step) = det_phase_winding(&loop_, &tol()).unwrap();
        assert_eq!(deg, 1);
        assert!(max_step < PI / 2.0);
    }

    #[test]
    fn winding_rejects_coarse_loop() {
        let n = 3;
        let loop_: Vec<CMatrix> = (0..=n)
            .map(|j| {
                CMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::from_polar(
                    1.0,
                    2.0 * PI * j as f64 / n as f64,
                )]))
            })
            .collect();
        assert!(matches!(
            det_phase_winding(&loop_, &tol()),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn winding_invariant_under_node_insertion() {
        let n = 16;
        let sample = |s: f64| {
            CMatrix::from_diagonal(&DVector::from_vec(vec![
                Complex64::from_polar(1.0, 2.0 * PI * s),
                Complex64::from_polar(1.0, (2.0 * PI * s).sin()),
            ]))
        };
        let coarse: Vec<CMatrix> = (0..=n).map(|j| sample(j as f64 / n as f64)).collect();
        let fine: Vec<CMatrix> = (0..=4 * n).map(|j| sample(j as f64 / (4 * n) as f64)).collect();
        let (d1, _) = det_phase_winding(&coarse, &tol()).unwrap();
        let (d2, _) = det_phase_winding(&fine, &tol()).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1, 1);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |xs| {
            let a = CMatrix::from_fn(n, n, |i, j| {
                Complex64::new(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1])
            });
            (&a + a.adjoint()).scale(0.5)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn log_spectrum_stays_principal(h in arb_hermitian(3)) {
            let tol = Tolerances::default();
            let u = exp_i_hermitian(&h.scale(5.0), 1.0, &tol).unwrap();
            match principal_log_unitary(&u, &tol) {
                Ok(l) => {
                    let (vals, _) = hermitian_eig(&l.t, &tol).unwrap();
                    prop_assert!(vals.iter().all(|&v| v > -PI - 1e-12 && v <= PI + 1e-12));
                    let rebuilt = exp_i_hermitian(&l.t, 1.0, &tol).unwrap();
                    prop_assert!(frob(&(rebuilt - &u)) < 1e-8);
                }
                Err(Error::BranchAmbiguous { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
            }
        }

        #[test]
        fn loewdin_output_is_projector_preserving(xs in proptest::collection::vec(-1.0f64..1.0, 2 * 4 * 2)) {
            let tol = Tolerances::default();
            let w = CMatrix::from_fn(4, 2, |i, j| {
                Complex64::new(xs[2 * (i * 2 + j)], xs[2 * (i * 2 + j) + 1])
            });
            if let Ok(f) = loewdin_frame(&w, &tol) {
                prop_assert!(unitarity_residual(&f) < 1e-10);
                let gram = w.adjoint() * &w;
                if let Some(gram_inv) = gram.try_inverse() {
                    let p_w = &w * gram_inv * w.adjoint();
                    let p_f = &f * f.adjoint();
                    prop_assert!(frob(&(p_w - p_f)) < 1e-8);
                }
            }
        }
    }
}
