//! Frame export format: JSON with per-node frames, the symmetric boundary
//! frame, its residual gauge and the obstruction set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{BoundaryFrames, FrameGrid, ObstructionSet};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexParts {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexParts {
    pub fn pack(m: &CMatrix) -> Self {
        ComplexParts {
            re: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn unpack(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(Error::ParseError("empty or mismatched matrix block".into()));
        }
        let cols = self.re[0].len();
        if self.re.iter().any(|r| r.len() != cols) || self.im.iter().any(|r| r.len() != cols) {
            return Err(Error::ParseError("ragged matrix block".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ObstructionExport {
    pub k: [f64; 2],
    pub label: String,
    pub u_obs: ComplexParts,
    pub t: ComplexParts,
    pub branch_margin: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundaryExport {
    pub nodes: Vec<[f64; 2]>,
    pub phi_hat: Vec<ComplexParts>,
    pub u_hat: Vec<ComplexParts>,
}

/// On-disk frame bundle: the cell sweep plus, optionally, the symmetric
/// boundary data.
#[derive(Debug, Serialize, Deserialize)]
pub struct FrameExport {
    /// `"B"` for the full unit cell, `"Beff"` for the effective half cell.
    pub cell: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub nodes: Vec<[f64; 2]>,
    pub frames: Vec<ComplexParts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryExport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstructions: Option<Vec<ObstructionExport>>,
}

impl FrameExport {
    pub fn from_parts(
        sweep: &FrameGrid,
        boundary: Option<&BoundaryFrames>,
        obstructions: Option<&ObstructionSet>,
    ) -> Self {
        let grid = &sweep.grid;
        let mut nodes = Vec::with_capacity(grid.node_count());
        for j in 0..=grid.ny() {
            for i in 0..=grid.nx() {
                nodes.push(grid.node_k(i, j));
            }
        }
        FrameExport {
            cell: match grid.cell {
                super::Cell::Full => "B".into(),
                super::Cell::Effective => "Beff".into(),
            },
            n: grid.n,
            nodes,
            frames: sweep.frames.iter().map(ComplexParts::pack).collect(),
            boundary: boundary.map(|b| BoundaryExport {
                nodes: b.phi.path.nodes.clone(),
                phi_hat: b.phi.frames.iter().map(ComplexParts::pack).collect(),
                u_hat: b.gauge.iter().map(ComplexParts::pack).collect(),
            }),
            obstructions: obstructions.map(|o| {
                o.points
                    .iter()
                    .zip(&o.labels)
                    .zip(&o.u_obs)
                    .zip(&o.logs)
                    .map(|(((k, label), u), log)| ObstructionExport {
                        k: *k,
                        label: label.clone(),
                        u_obs: ComplexParts::pack(u),
                        t: ComplexParts::pack(&log.t),
                        branch_margin: log.branch_margin,
                    })
                    .collect()
            }),
        }
    }
}

/// Write a frame bundle to disk.
pub fn export_frames(bundle: &FrameExport, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string(bundle).map_err(|e| Error::ParseError(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Read a frame bundle back.
pub fn import_frames(path: impl AsRef<Path>) -> Result<FrameExport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::ParseError(e.to_string()))
}
