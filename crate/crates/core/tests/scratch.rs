use blochobs::frame::{self, Cell};
use blochobs::invariants::*;
use blochobs::linalg;
use blochobs::model::*;
use blochobs::Tolerances;
use std::f64::consts::FRAC_PI_2;

#[test]
fn probe_obstruction_sign() {
    let tol = Tolerances::default();
    for (phi, label) in [(FRAC_PI_2, "+pi/2"), (-FRAC_PI_2, "-pi/2")] {
        let hal = haldane(1.0, 0.1, phi, 0.0).unwrap();
        let cp = chern_plaquette(&hal, 24, &tol).unwrap();
        let psi = frame::sweep_frame(&hal, 128, Cell::Full, &tol).unwrap();
        let obs = frame::obstruction_chern(&hal, &psi, &tol).unwrap();
        let bf = frame::boundary_frame_chern(&hal, &psi, &obs, &tol).unwrap();
        let (acc, max_step) = linalg::det_phase_accumulation(&bf.gauge);
        println!(
            "haldane {label}: plaquette = {}, winding(det Uhat) = {:.4}, max_step {:.3}, junction {:.2e}, sweep max_jump {:.3}",
            cp.value, acc, max_step, bf.junction_residual, psi.max_jump
        );
    }
    for w in [-2i64, 2] {
        let model = two_band_winding(w).unwrap();
        let cp = chern_plaquette(&model, 24, &tol).unwrap();
        let psi = frame::sweep_frame(&model, 128, Cell::Full, &tol).unwrap();
        let obs = frame::obstruction_chern(&model, &psi, &tol).unwrap();
        let bf = frame::boundary_frame_chern(&model, &psi, &obs, &tol).unwrap();
        let (acc, _) = linalg::det_phase_winding(&bf.gauge, &tol).map(|(d, m)| (d as f64, m)).unwrap_or((f64::NAN, 0.0));
        println!("winding model w={w}: plaquette = {}, deg(det Uhat) = {acc}", cp.value);
    }
}
