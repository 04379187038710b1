//! Bloch frames by discrete parallel transport, obstruction unitaries and
//! symmetric boundary frames.
//!
//! The fundamental unit cell `B = [-1/2, 1/2]^2` has vertices
//! `v1 = (-1/2, -1/2)`, `v2 = (1/2, -1/2)`, `v3 = (1/2, 1/2)`,
//! `v4 = (-1/2, 1/2)`. The effective half cell
//! `B_eff = [0, 1/2] x [-1/2, 1/2]` carries six time-reversal invariant
//! momenta on its boundary; the four on the lower-left path `S` are
//! labelled in traversal order `v1 = (0, 0)`, `v2 = (0, -1/2)`,
//! `v3 = (1/2, -1/2)`, `v4 = (1/2, 0)`.

mod chern;
pub mod gauges;
mod io;
mod trs;

pub use chern::{boundary_frame_chern, obstruction_chern};
pub use io::{export_frames, import_frames, FrameExport};
pub use trs::{boundary_frame_trs, obstruction_trs, unwind_map};
pub(crate) use trs::kramers_normalize_at;

use std::collections::BTreeMap;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianLog};
use crate::model::BlochModel;

/// Which momentum cell a grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    /// Fundamental unit cell `[-1/2, 1/2]^2`.
    Full,
    /// Effective half cell `[0, 1/2] x [-1/2, 1/2]`.
    Effective,
}

/// Uniform momentum grid of spacing `1/n` over a cell, nodes indexed
/// `(i, j)` with `0 <= i <= nx`, `0 <= j <= ny`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub cell: Cell,
    pub n: usize,
}

impl Grid {
    pub fn new(cell: Cell, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("grid needs n >= 2".into()));
        }
        if cell == Cell::Effective && n % 2 != 0 {
            return Err(Error::Invalid(
                "effective-cell grids need even n so the high-symmetry momenta are nodes".into(),
            ));
        }
        Ok(Grid { cell, n })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nx(&self) -> usize {
        match self.cell {
            Cell::Full => self.n,
            Cell::Effective => self.n / 2,
        }
    }

    pub fn ny(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> [f64; 2] {
        match self.cell {
            Cell::Full => [-0.5, -0.5],
            Cell::Effective => [0.0, -0.5],
        }
    }

    pub fn node_k(&self, i: usize, j: usize) -> [f64; 2] {
        let o = self.origin();
        [o[0] + i as f64 * self.h(), o[1] + j as f64 * self.h()]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx() + 1) + i
    }

    pub fn node_count(&self) -> usize {
        (self.nx() + 1) * (self.ny() + 1)
    }

    /// Counterclockwise boundary loop with the first node repeated at the
    /// end. Markers name the distinguished momenta; `boundary_nodes`
    /// returns the matching `(i, j)` grid indices.
    pub fn boundary_path(&self) -> DiscretePath {
        let ij = self.boundary_nodes();
        let nodes: Vec<[f64; 2]> = ij.iter().map(|&(i, j)| self.node_k(i, j)).collect();
        let mut markers = BTreeMap::new();
        let (nx, ny) = (self.nx(), self.ny());
        match self.cell {
            Cell::Full => {
                markers.insert("v1".into(), 0);
                markers.insert("v2".into(), nx);
                markers.insert("v3".into(), nx + ny);
                markers.insert("v4".into(), 2 * nx + ny);
            }
            Cell::Effective => {
                markers.insert("v1".into(), 0);
                markers.insert("v2".into(), ny / 2);
                markers.insert("v3".into(), ny / 2 + nx);
                markers.insert("v4".into(), ny + nx);
                markers.insert("k_e1pe2".into(), 3 * ny / 2 + nx);
                markers.insert("k_e2".into(), 3 * ny / 2 + 2 * nx);
            }
        }
        DiscretePath {
            nodes,
            closed: true,
            markers,
        }
    }

    /// Grid indices of the boundary loop, first node repeated at the end.
    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = Vec::with_capacity(2 * (nx + ny) + 1);
        match self.cell {
            Cell::Full => {
                // v1 -> v2 -> v3 -> v4 -> v1.
                out.extend((0..=nx).map(|i| (i, 0)));
                out.extend((1..=ny).map(|j| (nx, j)));
                out.extend((0..nx).rev().map(|i| (i, ny)));
                out.extend((0..ny).rev().map(|j| (0, j)));
                out.push((0, 0));
            }
            Cell::Effective => {
                // Start at (0, 0), run down the left edge, around the
                // lower-left path S, then up and back along the images.
                let mid = ny / 2;
                out.extend((0..=mid).rev().map(|j| (0, j)));
                out.extend((1..=nx).map(|i| (i, 0)));
                out.extend((1..=ny).map(|j| (nx, j)));
                out.extend((0..nx).rev().map(|i| (i, ny)));
                out.extend((mid..ny).rev().map(|j| (0, j)));
                out.push((0, mid));
            }
        }
        out
    }
}

/// Ordered list of momenta with named markers.
#[derive(Debug, Clone)]
pub struct DiscretePath {
    pub nodes: Vec<[f64; 2]>,
    pub closed: bool,
    pub markers: BTreeMap<String, usize>,
}

impl DiscretePath {
    pub fn open(nodes: Vec<[f64; 2]>) -> Result<Self> {
        let path = DiscretePath {
            nodes,
            closed: false,
            markers: BTreeMap::new(),
        };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() < 2 {
            return Err(Error::Invalid("path needs at least two nodes".into()));
        }
        for w in self.nodes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Invalid("consecutive path nodes coincide".into()));
            }
        }
        if self.closed {
            let first = self.nodes[0];
            let last = self.nodes[self.nodes.len() - 1];
            if (first[0] - last[0]).abs() > 1e-12 || (first[1] - last[1]).abs() > 1e-12 {
                return Err(Error::Invalid("closed path must repeat its first node".into()));
            }
        }
        for (name, &idx) in &self.markers {
            if idx >= self.nodes.len() {
                return Err(Error::Invalid(format!("marker {name} points outside the path")));
            }
        }
        Ok(())
    }

    pub fn marker(&self, name: &str) -> Result<usize> {
        self.markers
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("path has no marker {name}")))
    }
}

/// Orthonormal occupied frames attached to the nodes of a grid.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    pub grid: Grid,
    /// Indexed by [`Grid::index`].
    pub frames: Vec<CMatrix>,
    /// Largest Frobenius distance between frames at adjacent nodes.
    pub max_jump: f64,
}

impl FrameGrid {
    pub fn frame(&self, i: usize, j: usize) -> &CMatrix {
        &self.frames[self.grid.index(i, j)]
    }
}

/// Orthonormal occupied frames attached to the nodes of a path.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub path: DiscretePath,
    pub frames: Vec<CMatrix>,
}

/// Obstruction unitaries and their principal logarithms at distinguished
/// momenta.
#[derive(Debug, Clone)]
pub struct ObstructionSet {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<String>,
    pub u_obs: Vec<CMatrix>,
    pub logs: Vec<HermitianLog>,
    /// `||U_obs^T eps - eps U_obs||` per point; empty when no
    /// time-reversal data is involved.
    pub compat_residuals: Vec<f64>,
}

impl ObstructionSet {
    pub fn by_label(&self, label: &str) -> Option<(&CMatrix, &HermitianLog)> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| (&self.u_obs[i], &self.logs[i]))
    }
}

/// Symmetric boundary frame with its residual gauge.
#[derive(Debug, Clone)]
pub struct BoundaryFrames {
    /// The symmetric frame `Phi_hat` along the boundary loop (first node
    /// repeated at the end).
    pub phi: FramePath,
    /// Residual gauge `U_hat(k)` with `Phi_hat(k) = Psi(k) <| U_hat(k)`,
    /// one unitary per loop node.
    pub gauge: Vec<CMatrix>,
    /// Largest mismatch between independent branch formulas at the
    /// distinguished momenta where they must coincide.
    pub junction_residual: f64,
}

/// One step of discrete parallel transport: project the previous frame
/// into the occupied space at `k_next` and re-orthonormalize.
fn transport_step(
    model: &BlochModel,
    k_next: [f64; 2],
    frame: &CMatrix,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let occupied = model.occupied_frame(k_next, tol)?;
    let overlap = occupied.adjoint() * frame;
    let polar = linalg::loewdin_frame(&overlap, tol)?;
    Ok(occupied * polar)
}

/// Parallel transport of `initial` along `path.nodes[0..]`.
///
/// Unitary-covariant: transporting `initial <| V` yields the pointwise
/// `<| V` of the transport of `initial`.
pub fn transport_frame(
    model: &BlochModel,
    path: &DiscretePath,
    initial: &CMatrix,
    tol: &Tolerances,
) -> Result<FramePath> {
    path.validate()?;
    if initial.nrows() != model.bands() || initial.ncols() != model.occupied() {
        return Err(Error::Invalid(format!(
            "initial frame must be {} x {}",
            model.bands(),
            model.occupied()
        )));
    }
    if linalg::unitarity_residual(initial) > tol.gauge {
        return Err(Error::Invalid("initial frame is not orthonormal".into()));
    }
    let p0 = model.fermi_projector(path.nodes[0], tol)?.p;
    let span_residual = linalg::frob(&(&p0 * initial - initial));
    if span_residual > tol.gauge {
        return Err(Error::SubspaceMismatch {
            residual: span_residual,
        });
    }
    let mut frames = Vec::with_capacity(path.nodes.len());
    frames.push(initial.clone());
    for w in 1..path.nodes.len() {
        let next = transport_step(model, path.nodes[w], &frames[w - 1], tol)?;
        frames.push(next);
    }
    Ok(FramePath {
        path: path.clone(),
        frames,
    })
}

/// Continuous (discretely) Bloch frame on a cell grid: eigenframe at the
/// base vertex, transported along the bottom edge, then up each column.
///
/// Fails with [`Error::TooCoarse`] when adjacent frames jump by more than
/// `tol.cont`; the invariant drivers react by doubling the grid.
pub fn sweep_frame(model: &BlochModel, n: usize, cell: Cell, tol: &Tolerances) -> Result<FrameGrid> {
    let grid = Grid::new(cell, n)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut frames: Vec<Option<CMatrix>> = vec![None; grid.node_count()];
    let base = model.occupied_frame(grid.node_k(0, 0), tol)?;
    frames[grid.index(0, 0)] = Some(base);
    for i in 1..=nx {
        let prev = frames[grid.index(i - 1, 0)].take();
        let next = transport_step(model, grid.node_k(i, 0), prev.as_ref().unwrap(), tol)?;
        frames[grid.index(i - 1, 0)] = prev;
        frames[grid.index(i, 0)] = Some(next);
    }
    for i in 0..=nx {
        for j in 1..=ny {
            let prev = frames[grid.index(i, j - 1)].take();
            let next = transport_step(model, grid.node_k(i, j), prev.as_ref().unwrap(), tol)?;
            frames[grid.index(i, j - 1)] = prev;
            frames[grid.index(i, j)] = Some(next);
        }
    }
    let frames: Vec<CMatrix> = frames.into_iter().map(Option::unwrap).collect();
    let mut max_jump: f64 = 0.0;
    for j in 0..=ny {
        for i in 0..=nx {
            let here = &frames[grid.index(i, j)];
            if i + 1 <= nx {
                max_jump = max_jump.max(linalg::frob(&(&frames[grid.index(i + 1, j)] - here)));
            }
            if j + 1 <= ny {
                max_jump = max_jump.max(linalg::frob(&(&frames[grid.index(i, j + 1)] - here)));
            }
        }
    }
    if max_jump > tol.cont {
        return Err(Error::TooCoarse { max_jump });
    }
    Ok(FrameGrid {
        grid,
        frames,
        max_jump,
    })
}

/// Discrete tau-equivariance residual of a boundary frame: the largest
/// mismatch `||Phi(k + lambda) - tau_lambda Phi(k)||` over
/// boundary-identified node pairs.
pub fn boundary_f2_residual(model: &BlochModel, phi: &FramePath, grid: &Grid) -> f64 {
    let ij = grid.boundary_nodes();
    let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (pos, &node) in ij.iter().enumerate() {
        lookup.entry(node).or_insert(pos);
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut worst: f64 = 0.0;
    match grid.cell {
        Cell::Full => {
            let tau1 = model.tau_lambda([1, 0]);
            let tau2 = model.tau_lambda([0, 1]);
            for i in 0..=nx {
                let bottom = &phi.frames[lookup[&(i, 0)]];
                let top = &phi.frames[lookup[&(i, ny)]];
                worst = worst.max(linalg::frob(&(top - &tau2 * bottom)));
            }
            for j in 0..=ny {
                let left = &phi.frames[lookup[&(0, j)]];
                let right = &phi.frames[lookup[&(nx, j)]];
                worst = worst.max(linalg::frob(&(right - &tau1 * left)));
            }
        }
        Cell::Effective => {
            let tau2 = model.tau_lambda([0, 1]);
            for i in 0..=nx {
                let bottom = &phi.frames[lookup[&(i, 0)]];
                let top = &phi.frames[lookup[&(i, ny)]];
                worst = worst.max(linalg::frob(&(top - &tau2 * bottom)));
            }
        }
    }
    worst
}

/// Discrete time-reversal symmetry residual of a boundary frame on the
/// effective cell: the largest mismatch
/// `||Phi(-k + lambda) - tau_lambda Theta Phi(k) <| eps||` over
/// boundary-identified pairs (the two vertical edges).
pub fn boundary_f3_residual(model: &BlochModel, phi: &FramePath, grid: &Grid) -> Result<f64> {
    if grid.cell != Cell::Effective {
        return Err(Error::Invalid(
            "time-reversal residual is defined on the effective cell".into(),
        ));
    }
    let eps = model.epsilon()?.clone();
    let ij = grid.boundary_nodes();
    let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (pos, &node) in ij.iter().enumerate() {
        lookup.entry(node).or_insert(pos);
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let tau1 = model.tau_lambda([1, 0]);
    let mut worst: f64 = 0.0;
    for j in 0..=ny {
        // Left edge: -(0, k2) = (0, -k2), no translation.
        let here = &phi.frames[lookup[&(0, j)]];
        let mirror = &phi.frames[lookup[&(0, ny - j)]];
        let image = model.theta_frame(here)? * &eps;
        worst = worst.max(linalg::frob(&(mirror - image)));
        // Right edge: -(1/2, k2) + e1 = (1/2, -k2).
        let here = &phi.frames[lookup[&(nx, j)]];
        let mirror = &phi.frames[lookup[&(nx, ny - j)]];
        let image = &tau1 * (model.theta_frame(here)? * &eps);
        worst = worst.max(linalg::frob(&(mirror - image)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
