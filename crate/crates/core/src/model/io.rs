//! Hopping-file format: JSON with explicit real and imaginary parts.
//!
//! Schema:
//! ```json
//! {
//!   "n": 2, "m": 1,
//!   "lattice": [[1.0, 0.0], [0.0, 1.0]],
//!   "hoppings": [{"R": [0, 0], "re": [[...]], "im": [[...]]}, ...],
//!   "tau": [{"re": [[...]], "im": [[...]]}, {"re": [[...]], "im": [[...]]}],
//!   "trs": {"u_theta": {"re": ..., "im": ...}, "epsilon": {"re": ..., "im": ...}}
//! }
//! ```
//! `tau` and `trs` are optional. Matrices are row-major nested lists. The
//! loader validates every model invariant and reports the first violation
//! with its location.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{BlochModel, TrsData};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HoppingJson {
    #[serde(rename = "R")]
    r: [i64; 2],
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TrsJson {
    u_theta: MatrixJson,
    epsilon: MatrixJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    m: usize,
    lattice: [[f64; 2]; 2],
    hoppings: Vec<HoppingJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trs: Option<TrsJson>,
}

fn matrix_from_parts(re: &[Vec<f64>], im: &[Vec<f64>], rows: usize, cols: usize, at: &str) -> Result<CMatrix> {
    let shape_ok = |part: &[Vec<f64>]| part.len() == rows && part.iter().all(|row| row.len() == cols);
    if !shape_ok(re) || !shape_ok(im) {
        return Err(Error::ParseError(format!(
            "{at}: expected {rows}x{cols} re/im blocks"
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(re[i][j], im[i][j])
    }))
}

fn matrix_to_parts(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

/// Parse a model from JSON text.
pub fn model_from_json(text: &str) -> Result<BlochModel> {
    let parsed: ModelJson =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let n = parsed.n;
    let mut hoppings = Vec::with_capacity(parsed.hoppings.len());
    for (idx, hop) in parsed.hoppings.iter().enumerate() {
        let at = format!("hoppings[{idx}] (R = [{}, {}])", hop.r[0], hop.r[1]);
        hoppings.push((hop.r, matrix_from_parts(&hop.re, &hop.im, n, n, &at)?));
    }
    let tau = match &parsed.tau {
        None => None,
        Some(list) => {
            if list.len() != 2 {
                return Err(Error::ParseError(format!(
                    "tau: expected exactly 2 generators, got {}",
                    list.len()
                )));
            }
            Some([
                matrix_from_parts(&list[0].re, &list[0].im, n, n, "tau[0]")?,
                matrix_from_parts(&list[1].re, &list[1].im, n, n, "tau[1]")?,
            ])
        }
    };
    let trs = match &parsed.trs {
        None => None,
        Some(t) => Some(TrsData {
            u_theta: matrix_from_parts(&t.u_theta.re, &t.u_theta.im, n, n, "trs.u_theta")?,
            epsilon: matrix_from_parts(&t.epsilon.re, &t.epsilon.im, parsed.m, parsed.m, "trs.epsilon")?,
        }),
    };
    BlochModel::new("file", n, parsed.m, hoppings, parsed.lattice, tau, trs)
}

/// Serialize a model to JSON text.
pub fn model_to_json(model: &BlochModel) -> String {
    let hoppings = model
        .hoppings()
        .iter()
        .map(|(r, h)| {
            let (re, im) = matrix_to_parts(h);
            HoppingJson { r: *r, re, im }
        })
        .collect();
    let tau = (!model.periodic_gauge()).then(|| {
        [model.tau_lambda([1, 0]), model.tau_lambda([0, 1])]
            .iter()
            .map(|t| {
                let (re, im) = matrix_to_parts(t);
                MatrixJson { re, im }
            })
            .collect()
    });
    let trs = model.trs().map(|data| {
        let (ure, uim) = matrix_to_parts(&data.u_theta);
        let (ere, eim) = matrix_to_parts(&data.epsilon);
        TrsJson {
            u_theta: MatrixJson { re: ure, im: uim },
            epsilon: MatrixJson { re: ere, im: eim },
        }
    });
    let doc = ModelJson {
        n: model.bands(),
        m: model.occupied(),
        lattice: model.lattice_basis(),
        hoppings,
        tau,
        trs,
    };
    serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
}

/// Load a model from a hopping file, validating all invariants.
pub fn load_model(path: impl AsRef<Path>) -> Result<BlochModel> {
    let text = std::fs::read_to_string(path)?;
    model_from_json(&text)
}

/// Write a model to a hopping file.
pub fn save_model(model: &BlochModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_json(model))?;
    Ok(())
}
