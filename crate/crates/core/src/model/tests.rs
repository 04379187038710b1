use super::*;
use crate::linalg;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

fn tol() -> Tolerances {
    Tolerances::default()
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[test]
fn haldane_is_hermitian_and_periodic() {
    let model = haldane(1.0, 0.1, FRAC_PI_2, 0.3).unwrap();
    for i in 0..7 {
        for j in 0..7 {
            let k = [i as f64 / 7.0 - 0.5, j as f64 / 7.0 - 0.5];
            let h = model.hamiltonian(k);
            assert!(linalg::frob(&(&h - h.adjoint())) < 1e-12);
            let shifted = model.hamiltonian([k[0] + 1.0, k[1] - 1.0]);
            assert!(linalg::frob(&(shifted - &h)) < 1e-12);
        }
    }
}

#[test]
fn haldane_gap_at_dirac_point() {
    // At the Dirac point the off-diagonal vanishes and the gap is pure
    // next-nearest-neighbor mass: 6 sqrt(3) t2 for phi = pi/2, M = 0.
    let model = haldane(1.0, 0.1, FRAC_PI_2, 0.0).unwrap();
    let sample = model.fermi_projector([1.0 / 3.0, 1.0 / 3.0], &tol()).unwrap();
    assert!((sample.gap - 6.0 * SQRT3 * 0.1).abs() < 1e-9);
}

#[test]
fn haldane_gapless_dirac_point_reports_gap_closed() {
    let model = haldane(1.0, 0.0, 0.0, 0.0).unwrap();
    let err = model.fermi_projector([1.0 / 3.0, 1.0 / 3.0], &tol());
    assert!(matches!(err, Err(Error::GapClosed { .. })));
}

#[test]
fn haldane_rejects_zero_t1() {
    assert!(matches!(haldane(0.0, 0.1, 0.0, 0.0), Err(Error::Invalid(_))));
}

#[test]
fn kane_mele_symmetries_hold() {
    let model = kane_mele(1.0, 0.06, 0.0, 0.1).unwrap();
    let report = model.verify_symmetries(16, &tol()).unwrap();
    assert!(report.pass, "covariance {:.3e}", report.covariance);
    assert!(report.hermiticity < 1e-12);
    assert!(report.covariance < 1e-12);
    assert!(report.trs.unwrap() < 1e-12);
}

#[test]
fn kane_mele_with_rashba_keeps_time_reversal() {
    let model = kane_mele(1.0, 0.06, 0.05, 0.1).unwrap();
    let report = model.verify_symmetries(12, &tol()).unwrap();
    assert!(report.pass);
    assert!(report.trs.unwrap() < 1e-12, "rashba breaks TRS: {:?}", report.trs);
}

#[test]
fn kane_mele_gap_closes_at_transition() {
    // lv = 3 sqrt(3) lso closes the gap at one Dirac point.
    let lso = 0.06;
    let model = kane_mele(1.0, lso, 0.0, 3.0 * SQRT3 * lso).unwrap();
    let gapless = [[-1.0 / 3.0, -1.0 / 3.0], [1.0 / 3.0, 1.0 / 3.0]]
        .iter()
        .any(|&k| model.fermi_projector(k, &tol()).is_err());
    assert!(gapless);
    let qsh = kane_mele(1.0, lso, 0.0, 0.1).unwrap();
    assert!(qsh.fermi_projector([1.0 / 3.0, 1.0 / 3.0], &tol()).is_ok());
}

#[test]
fn haldane_has_no_trs_section() {
    let model = haldane(1.0, 0.1, FRAC_PI_2, 0.0).unwrap();
    let report = model.verify_symmetries(8, &tol()).unwrap();
    assert!(report.trs.is_none());
    assert!(report.pass);
}

#[test]
fn corrupted_tau_fails_covariance() {
    // A non-trivial tau that does not commute with the hoppings breaks
    // the covariance law, and the report says so.
    let model = haldane(1.0, 0.1, FRAC_PI_2, 0.0)
        .unwrap()
        .with_tau([diag_real(&[1.0, -1.0]), linalg::ident(2)])
        .unwrap();
    let report = model.verify_symmetries(6, &tol()).unwrap();
    assert!(!report.pass);
    assert!(report.covariance > 1e-3);
}

#[test]
fn commuting_tau_is_covariant() {
    let model = atomic_insulator(3, 1, false)
        .unwrap()
        .with_tau([
            diag_real(&[1.0, -1.0, 1.0]),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::from_polar(1.0, 0.4),
                Complex64::from_polar(1.0, -1.1),
                Complex64::from_polar(1.0, 2.0),
            ])),
        ])
        .unwrap();
    let report = model.verify_symmetries(6, &tol()).unwrap();
    assert!(report.pass, "covariance {:.3e}", report.covariance);
}

#[test]
fn atomic_projector_is_constant_diag() {
    let model = atomic_insulator(2, 1, false).unwrap();
    for k in [[0.0, 0.0], [0.31, -0.47], [2.5, 13.0]] {
        let s = model.fermi_projector(k, &tol()).unwrap();
        assert!(linalg::frob(&(&s.p - diag_real(&[1.0, 0.0]))) < 1e-14);
        assert!((s.gap - 2.0).abs() < 1e-14);
    }
}

#[test]
fn projector_invariants_hold() {
    let model = kane_mele(1.0, 0.06, 0.03, 0.1).unwrap();
    let s = model.fermi_projector([0.21, -0.37], &tol()).unwrap();
    let p = &s.p;
    assert!(linalg::frob(&(p * p - p)) < 1e-10);
    assert!(linalg::frob(&(p - &p.adjoint())) < 1e-12);
    let trace: Complex64 = p.trace();
    assert!((trace.re - 2.0).abs() < 1e-8 && trace.im.abs() < 1e-12);
    assert_eq!(s.occupied_energies.len(), 2);
}

#[test]
fn projector_is_gauge_independent_under_degeneracy() {
    // Occupied bands of the atomic insulator are fully degenerate; any
    // eigenbasis must give the same projector.
    let model = atomic_insulator(4, 2, true).unwrap();
    let s1 = model.fermi_projector([0.1, 0.2], &tol()).unwrap();
    let s2 = model.fermi_projector([-0.4, 0.35], &tol()).unwrap();
    assert!(linalg::frob(&(&s1.p - &s2.p)) < 1e-13);
    assert!(linalg::frob(&(&s1.p - diag_real(&[1.0, 1.0, 0.0, 0.0]))) < 1e-13);
}

#[test]
fn atomic_trs_requires_even_blocks() {
    assert!(atomic_insulator(3, 1, true).is_err());
    assert!(atomic_insulator(4, 2, true).is_ok());
}

#[test]
fn theta_squares_to_minus_one_on_frames() {
    let model = kane_mele(1.0, 0.06, 0.0, 0.1).unwrap();
    let frame = model.occupied_frame([0.13, 0.27], &tol()).unwrap();
    let twice = model.theta_frame(&model.theta_frame(&frame).unwrap()).unwrap();
    assert!(linalg::frob(&(twice + &frame)) < 1e-12);
}

#[test]
fn file_round_trip_matches_builtin() {
    let model = haldane(1.0, 0.1, FRAC_PI_2, 0.0).unwrap();
    let text = model_to_json(&model);
    let loaded = model_from_json(&text).unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let k = [i as f64 / 16.0 - 0.5, j as f64 / 16.0 - 0.5];
            let d = model.hamiltonian(k) - loaded.hamiltonian(k);
            assert!(linalg::frob(&d) < 1e-12);
        }
    }
}

#[test]
fn loader_rejects_empty_hoppings() {
    let text = r#"{"n": 2, "m": 1, "lattice": [[1,0],[0,1]], "hoppings": []}"#;
    assert!(matches!(model_from_json(text), Err(Error::ParseError(_))));
}

#[test]
fn loader_rejects_missing_hermitian_partner() {
    let text = r#"{
        "n": 1, "m": 1, "lattice": [[1,0],[0,1]],
        "hoppings": [
            {"R": [0,0], "re": [[0.0]], "im": [[0.0]]},
            {"R": [1,0], "re": [[1.0]], "im": [[0.0]]}
        ]
    }"#;
    // n = 1, m = 1 is also invalid, so use a 2-band variant.
    assert!(model_from_json(text).is_err());
    let text = r#"{
        "n": 2, "m": 1, "lattice": [[1,0],[0,1]],
        "hoppings": [
            {"R": [0,0], "re": [[1.0, 0.0], [0.0, -1.0]], "im": [[0,0],[0,0]]},
            {"R": [1,0], "re": [[0.0, 1.0], [0.0, 0.0]], "im": [[0,0],[0,0]]}
        ]
    }"#;
    assert!(matches!(
        model_from_json(text),
        Err(Error::HermiticityViolation(1, 0))
    ));
}

#[test]
fn loader_rejects_bad_theta_square() {
    let model = kane_mele(1.0, 0.06, 0.0, 0.1).unwrap();
    let mut text = model_to_json(&model);
    // Sabotage u_theta: replace the -1 entries by +1 so Theta^2 = +1.
    text = text.replace("-1.0", "1.0");
    match model_from_json(&text) {
        Err(Error::TrsInconsistent(_)) => {}
        other => panic!("expected TrsInconsistent, got {other:?}"),
    }
}

#[test]
fn loader_reports_shape_violation_with_location() {
    let text = r#"{
        "n": 2, "m": 1, "lattice": [[1,0],[0,1]],
        "hoppings": [{"R": [0,0], "re": [[1.0]], "im": [[0.0]]}]
    }"#;
    match model_from_json(text) {
        Err(Error::ParseError(msg)) => assert!(msg.contains("hoppings[0]"), "{msg}"),
        other => panic!("expected ParseError, got {other:?}"),
    }
}

#[test]
fn save_and_load_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("km.json");
    let model = kane_mele(1.0, 0.06, 0.05, 0.1).unwrap();
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert!(loaded.has_trs());
    assert_eq!(loaded.bands(), 4);
    let d = model.hamiltonian([0.2, 0.3]) - loaded.hamiltonian([0.2, 0.3]);
    assert!(linalg::frob(&d) < 1e-12);
}

#[test]
fn two_band_models_are_gapped() {
    for w in -2..=2 {
        let model = two_band_winding(w).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let k = [i as f64 / 9.0 - 0.5, j as f64 / 9.0 - 0.5];
                let s = model.fermi_projector(k, &tol()).unwrap();
                assert!(s.gap > 0.1, "w = {w}, k = {k:?}, gap = {}", s.gap);
            }
        }
    }
}

#[test]
fn kane_mele_epsilon_is_normal_form() {
    let model = kane_mele(1.0, 0.06, 0.0, 0.1).unwrap();
    let eps = model.epsilon().unwrap();
    let expected = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    assert!(linalg::frob(&(eps - &expected)) < 1e-15);
}

#[test]
fn haldane_phase_angle_pi_literals_behave() {
    // Regression guard on the mass formula: the gap at the Dirac point is
    // |M - 3 sqrt(3) t2 sin(phi)| * 2 when the off-diagonal vanishes.
    let t2 = 0.1;
    for (phi, m_stag) in [(FRAC_PI_2, 0.25), (PI / 4.0, 0.1), (-FRAC_PI_2, 0.4)] {
        let model = haldane(1.0, t2, phi, m_stag).unwrap();
        let s = model.fermi_projector([1.0 / 3.0, 1.0 / 3.0], &tol()).unwrap();
        let expected = 2.0 * (m_stag - 3.0 * SQRT3 * t2 * phi.sin()).abs();
        assert!(
            (s.gap - expected).abs() < 1e-9,
            "phi = {phi}, M = {m_stag}: gap {} vs expected {expected}",
            s.gap
        );
    }
}
