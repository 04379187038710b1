//! Built-in Bloch-Hamiltonian families.

use num_complex::Complex64;
use std::collections::BTreeMap;

use super::{diag_real, BlochModel, TrsData};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Accumulates hopping blocks with the Hermiticity pairing
/// `H_{-R} = H_R^dagger` maintained by construction.
struct HopBuilder {
    n: usize,
    blocks: BTreeMap<[i64; 2], CMatrix>,
}

impl HopBuilder {
    fn new(n: usize) -> Self {
        HopBuilder {
            n,
            blocks: BTreeMap::new(),
        }
    }

    fn block(&mut self, r: [i64; 2]) -> &mut CMatrix {
        let n = self.n;
        self.blocks.entry(r).or_insert_with(|| CMatrix::zeros(n, n))
    }

    /// On-site energy on orbital `a`.
    fn onsite(&mut self, a: usize, value: f64) {
        self.block([0, 0])[(a, a)] += Complex64::new(value, 0.0);
    }

    /// Hopping amplitude `amp` from orbital `b` in cell `R` into orbital
    /// `a` in the home cell; the Hermitian partner is added automatically.
    fn hop(&mut self, r: [i64; 2], a: usize, b: usize, amp: Complex64) {
        self.block(r)[(a, b)] += amp;
        self.block([-r[0], -r[1]])[(b, a)] += amp.conj();
    }

    /// Adds `coef * cos(2 pi k.R) * M` for Hermitian `M` and `R != 0`.
    fn cos_term(&mut self, r: [i64; 2], m: &CMatrix, coef: f64) {
        let half = m.scale(coef / 2.0);
        *self.block(r) += &half;
        *self.block([-r[0], -r[1]]) += &half;
    }

    /// Adds `coef * sin(2 pi k.R) * M` for Hermitian `M` and `R != 0`.
    fn sin_term(&mut self, r: [i64; 2], m: &CMatrix, coef: f64) {
        let half = (m * Complex64::new(0.0, -0.5)).scale(coef);
        *self.block(r) += &half;
        *self.block([-r[0], -r[1]]) -= &half;
    }

    fn finish(self) -> Vec<([i64; 2], CMatrix)> {
        self.blocks.into_iter().collect()
    }
}

/// Home-cell offsets of the three nearest-neighbor bonds on the honeycomb
/// lattice (sublattice A to B), and the positively oriented
/// next-nearest-neighbor triple they induce.
const NN_CELLS: [[i64; 2]; 3] = [[0, 0], [1, 0], [0, -1]];
const NNN_TRIPLE: [[i64; 2]; 3] = [[1, 0], [0, 1], [-1, -1]];

/// Honeycomb lattice basis at 120 degrees, unit lattice constant.
const HONEYCOMB: [[f64; 2]; 2] = [[1.0, 0.0], [-0.5, 0.866_025_403_784_438_6]];

/// Cartesian unit vectors of the three nearest-neighbor bonds, in the same
/// order as [`NN_CELLS`].
const NN_DIRS: [[f64; 2]; 3] = [
    [-0.866_025_403_784_438_6, 0.5],
    [0.866_025_403_784_438_6, 0.5],
    [0.0, -1.0],
];

/// Two-band Chern insulator on the honeycomb lattice: nearest-neighbor
/// hopping `t1`, complex next-nearest hopping `t2 e^{i phi}` with opposite
/// chirality on the two sublattices, staggered mass `m_stag`.
///
/// Gapped away from `|m_stag| = 3 sqrt(3) t2 |sin phi|`; the occupied band
/// carries `|C| = 1` inside that lobe and `C = 0` outside.
pub fn haldane(t1: f64, t2: f64, phi: f64, m_stag: f64) -> Result<BlochModel> {
    if t1 == 0.0 {
        return Err(Error::Invalid("haldane needs t1 != 0".into()));
    }
    let mut b = HopBuilder::new(2);
    b.onsite(0, m_stag);
    b.onsite(1, -m_stag);
    for r in NN_CELLS {
        b.hop(r, 0, 1, Complex64::new(t1, 0.0));
    }
    let up = Complex64::from_polar(t2, phi);
    for r in NNN_TRIPLE {
        b.hop(r, 0, 0, up);
        b.hop(r, 1, 1, up.conj());
    }
    BlochModel::new("haldane", 2, 1, b.finish(), HONEYCOMB, None, None)
}

/// Four-band quantum spin Hall model on the honeycomb lattice, basis
/// ordered as (A up, B up, A down, B down): nearest-neighbor hopping `t`,
/// intrinsic spin-orbit `lso`, Rashba coupling `lr`, staggered potential
/// `lv`. Time-reversal symmetric with `Theta^2 = -1`.
///
/// At `lr = 0` the spectrum closes at `lv = 3 sqrt(3) lso`; below that the
/// model is in the quantum spin Hall phase (Z2 index 1).
pub fn kane_mele(t: f64, lso: f64, lr: f64, lv: f64) -> Result<BlochModel> {
    if t == 0.0 {
        return Err(Error::Invalid("kane_mele needs t != 0".into()));
    }
    let mut b = HopBuilder::new(4);
    for (a_site, b_site) in [(0usize, 1usize), (2, 3)] {
        for r in NN_CELLS {
            b.hop(r, a_site, b_site, Complex64::new(t, 0.0));
        }
    }
    for a in [0usize, 2] {
        b.onsite(a, lv);
    }
    for a in [1usize, 3] {
        b.onsite(a, -lv);
    }
    // Intrinsic spin-orbit: Haldane phases of opposite chirality for the
    // two spins, opposite sign on the two sublattices.
    let i_lso = Complex64::new(0.0, lso);
    for r in NNN_TRIPLE {
        b.hop(r, 0, 0, -i_lso);
        b.hop(r, 1, 1, i_lso);
        b.hop(r, 2, 2, i_lso);
        b.hop(r, 3, 3, -i_lso);
    }
    // Rashba: i lr (s x d_hat)_z on each nearest-neighbor bond.
    if lr != 0.0 {
        for (r, d) in NN_CELLS.iter().zip(NN_DIRS.iter()) {
            let up_down = Complex64::new(-d[0], d[1]) * lr;
            let down_up = Complex64::new(d[0], d[1]) * lr;
            b.hop(*r, 0, 3, up_down);
            b.hop(*r, 2, 1, down_up);
        }
    }
    let mut u_theta = CMatrix::zeros(4, 4);
    u_theta[(2, 0)] = Complex64::new(1.0, 0.0);
    u_theta[(3, 1)] = Complex64::new(1.0, 0.0);
    u_theta[(0, 2)] = Complex64::new(-1.0, 0.0);
    u_theta[(1, 3)] = Complex64::new(-1.0, 0.0);
    let trs = TrsData {
        u_theta,
        epsilon: epsilon_normal_form(1),
    };
    BlochModel::new("kane_mele", 4, 2, b.finish(), HONEYCOMB, None, Some(trs))
}

/// Flat-band reference insulator: `H(k) = diag(-1, ..., -1, +1, ..., +1)`
/// constant in `k`, with `m` occupied bands. With `with_trs`, both `m` and
/// `n - m` must be even so a fermionic time reversal can act within each
/// energy block.
pub fn atomic_insulator(n: usize, m: usize, with_trs: bool) -> Result<BlochModel> {
    if n == 0 || m == 0 || m >= n {
        return Err(Error::Invalid(format!(
            "atomic insulator needs 0 < m < n, got n = {n}, m = {m}"
        )));
    }
    let energies: Vec<f64> = (0..n).map(|a| if a < m { -1.0 } else { 1.0 }).collect();
    let hoppings = vec![([0i64, 0i64], diag_real(&energies))];
    let trs = if with_trs {
        if m % 2 != 0 || (n - m) % 2 != 0 {
            return Err(Error::Invalid(
                "atomic insulator with time reversal needs even m and even n - m".into(),
            ));
        }
        let mut u_theta = CMatrix::zeros(n, n);
        let j2 = epsilon_normal_form(2);
        for blk in 0..n / 2 {
            for i in 0..2 {
                for j in 0..2 {
                    u_theta[(2 * blk + i, 2 * blk + j)] = j2[(i, j)];
                }
            }
        }
        Some(TrsData {
            u_theta,
            epsilon: epsilon_normal_form(m / 2),
        })
    } else {
        None
    };
    BlochModel::new(
        "atomic",
        n,
        m,
        hoppings,
        [[1.0, 0.0], [0.0, 1.0]],
        None,
        trs,
    )
}

/// The normal form of the reshuffling matrix: `pairs` diagonal blocks of
/// `[[0, 1], [-1, 0]]`.
pub(crate) fn epsilon_normal_form(pairs: usize) -> CMatrix {
    let mut eps = CMatrix::zeros(2 * pairs, 2 * pairs);
    for b in 0..pairs {
        eps[(2 * b, 2 * b + 1)] = Complex64::new(1.0, 0.0);
        eps[(2 * b + 1, 2 * b)] = Complex64::new(-1.0, 0.0);
    }
    eps
}

/// Synthetic two-band model `H(k) = d(k) . sigma` whose `d`-map covers the
/// sphere `winding` times, for `winding` in `-2 ..= 2`. The occupied band
/// carries Chern number equal to `winding` under this crate's orientation
/// convention.
pub fn two_band_winding(winding: i64) -> Result<BlochModel> {
    if !(-2..=2).contains(&winding) {
        return Err(Error::Invalid(format!(
            "two_band_winding supports winding in -2..=2, got {winding}"
        )));
    }
    let sigma_x = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let sigma_y = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let sigma_z = diag_real(&[1.0, -1.0]);

    let mut b = HopBuilder::new(2);
    // d3 = u + cos w1 + cos w2, with u = -1 inside the topological regime
    // and u = -3 for the trivial reference.
    let u = if winding == 0 { -3.0 } else { -1.0 };
    *b.block([0, 0]) += sigma_z.scale(u);
    b.cos_term([1, 0], &sigma_z, 1.0);
    b.cos_term([0, 1], &sigma_z, 1.0);
    // The occupied (lower) band sees the d-map through the south pole, so
    // its Chern number is minus the covering number of k -> d_hat;
    // mirroring d2 flips the covering sign accordingly.
    let sign = if winding < 0 { 1.0 } else { -1.0 };
    match winding.abs() {
        0 | 1 => {
            // d1 + i d2 = sin w1 + i sin w2
            b.sin_term([1, 0], &sigma_x, 1.0);
            b.sin_term([0, 1], &sigma_y, sign);
        }
        2 => {
            // d1 + i d2 = (sin w1 + i sin w2)^2
            b.cos_term([0, 2], &sigma_x, 0.5);
            b.cos_term([2, 0], &sigma_x, -0.5);
            b.cos_term([1, -1], &sigma_y, sign);
            b.cos_term([1, 1], &sigma_y, -sign);
        }
        _ => unreachable!(),
    }
    BlochModel::new(
        format!("winding{winding}"),
        2,
        1,
        b.finish(),
        [[1.0, 0.0], [0.0, 1.0]],
        None,
        None,
    )
}
