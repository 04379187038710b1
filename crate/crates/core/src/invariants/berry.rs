//! Berry connection and curvature fields from a frame grid.

use crate::error::Result;
use crate::frame::FrameGrid;
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Berry connection coefficients and abelian curvature on a cell grid.
#[derive(Debug, Clone)]
pub struct BerryField {
    /// Connection matrices `A_mu(k)_ab = -i <psi_a, d_mu psi_b>` per node
    /// (Hermitized), one per direction.
    pub a1: Vec<CMatrix>,
    pub a2: Vec<CMatrix>,
    /// Trace of the connection per node, `[tr A_1, tr A_2]`.
    pub abelian_a: Vec<[f64; 2]>,
    /// Abelian curvature flux per plaquette (density times plaquette
    /// area), from the projector route `-i Tr(P [d_1 P, d_2 P])`.
    pub abelian_f: Vec<f64>,
    /// Largest interior-node discrepancy between the curl-of-A route and
    /// the projector route for the curvature density; shrinks as `1/N^2`.
    pub curvature_discrepancy: f64,
    pub grid_n: usize,
}

impl BerryField {
    /// Total curvature flux over the grid's cell.
    pub fn total_flux(&self) -> f64 {
        self.abelian_f.iter().sum()
    }
}

/// Differentiate the frame field by central differences in the grid
/// interior and one-sided differences on the cell edges, and assemble
/// connection and curvature fields.
pub fn berry_field(frames: &FrameGrid) -> Result<BerryField> {
    let grid = &frames.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let h = grid.h();
    let f = |i: usize, j: usize| frames.frame(i, j);

    // d_mu Psi with one-sided fallbacks at the cell edges.
    let derivative = |lo: &CMatrix, hi: &CMatrix, spacing: f64| (hi - lo).scale(1.0 / spacing);
    let d1 = |i: usize, j: usize| -> CMatrix {
        if i == 0 {
            derivative(f(0, j), f(1, j), h)
        } else if i == nx {
            derivative(f(nx - 1, j), f(nx, j), h)
        } else {
            derivative(f(i - 1, j), f(i + 1, j), 2.0 * h)
        }
    };
    let d2 = |i: usize, j: usize| -> CMatrix {
        if j == 0 {
            derivative(f(i, 0), f(i, 1), h)
        } else if j == ny {
            derivative(f(i, ny - 1), f(i, ny), h)
        } else {
            derivative(f(i, j - 1), f(i, j + 1), 2.0 * h)
        }
    };
    let connection = |frame: &CMatrix, d: &CMatrix| -> CMatrix {
        let raw = (frame.adjoint() * d) * Complex64::new(0.0, -1.0);
        (&raw + raw.adjoint()).scale(0.5)
    };

    let mut a1 = Vec::with_capacity(grid.node_count());
    let mut a2 = Vec::with_capacity(grid.node_count());
    let mut abelian_a = Vec::with_capacity(grid.node_count());
    for j in 0..=ny {
        for i in 0..=nx {
            let frame = f(i, j);
            let c1 = connection(frame, &d1(i, j));
            let c2 = connection(frame, &d2(i, j));
            abelian_a.push([c1.trace().re, c2.trace().re]);
            a1.push(c1);
            a2.push(c2);
        }
    }

    // Projector-route curvature density at nodes, from P = Psi Psi^dagger.
    let projector = |i: usize, j: usize| -> CMatrix {
        let frame = f(i, j);
        frame * frame.adjoint()
    };
    let dp = |at: &dyn Fn(usize, usize) -> CMatrix,
              i: usize,
              j: usize,
              axis: usize|
     -> CMatrix {
        let (lo, hi, spacing) = match axis {
            0 if i == 0 => (at(0, j), at(1, j), h),
            0 if i == nx => (at(nx - 1, j), at(nx, j), h),
            0 => (at(i - 1, j), at(i + 1, j), 2.0 * h),
            _ if j == 0 => (at(i, 0), at(i, 1), h),
            _ if j == ny => (at(i, ny - 1), at(i, ny), h),
            _ => (at(i, j - 1), at(i, j + 1), 2.0 * h),
        };
        (hi - lo).scale(1.0 / spacing)
    };
    let proj_fn: &dyn Fn(usize, usize) -> CMatrix = &projector;
    let density_proj = |i: usize, j: usize| -> f64 {
        let p = projector(i, j);
        let dp1 = dp(proj_fn, i, j, 0);
        let dp2 = dp(proj_fn, i, j, 1);
        let comm = &dp1 * &dp2 - &dp2 * &dp1;
        (p * comm).trace().im
    };

    let mut density = vec![0.0; grid.node_count()];
    for j in 0..=ny {
        for i in 0..=nx {
            density[grid.index(i, j)] = density_proj(i, j);
        }
    }
    let mut abelian_f = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mean = 0.25
                * (density[grid.index(i, j)]
                    + density[grid.index(i + 1, j)]
                    + density[grid.index(i, j + 1)]
                    + density[grid.index(i + 1, j + 1)]);
            abelian_f.push(mean * h * h);
        }
    }

    // Curl-of-A route on interior nodes, against the projector route.
    let mut discrepancy: f64 = 0.0;
    let at_a = |mu: usize, i: usize, j: usize| -> f64 {
        let v = abelian_a[grid.index(i, j)];
        v[mu]
    };
    for j in 1..ny {
        for i in 1..nx {
            let curl = (at_a(1, i + 1, j) - at_a(1, i - 1, j)) / (2.0 * h)
                - (at_a(0, i, j + 1) - at_a(0, i, j - 1)) / (2.0 * h);
            discrepancy = discrepancy.max((curl - density[grid.index(i, j)]).abs());
        }
    }

    Ok(BerryField {
        a1,
        a2,
        abelian_a,
        abelian_f,
        curvature_discrepancy: discrepancy,
        grid_n: grid.n,
    })
}
