//! The repo-wide JSON schema for complex matrices and probability vectors.
//!
//! A matrix is `{"dim": n, "rows": [[[re, im], ...], ...]}`. Readers validate
//! the invariants of the requested type: Hermiticity for plain matrices, unit
//! trace and strict positivity for densities, zero trace for tangents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{SimplexPoint, SimplexTangent};
use crate::spectra::{C64, CMatrix, DensityMatrix, HermitianMatrix, TangentVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        let n = h.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = h.entry(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self { dim: n, rows }
    }

    pub fn to_cmatrix(&self) -> Result<CMatrix> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Parse(format!(
                "matrix shape does not match dim={}",
                self.dim
            )));
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                m[(i, j)] = C64::new(re, im);
            }
        }
        Ok(m)
    }
}

pub fn parse_hermitian(json: &str) -> Result<HermitianMatrix> {
    let raw: MatrixJson = serde_json::from_str(json)?;
    HermitianMatrix::new(raw.to_cmatrix()?)
}

pub fn parse_density(json: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(parse_hermitian(json)?)
}

pub fn parse_tangent(json: &str) -> Result<TangentVector> {
    TangentVector::new(parse_hermitian(json)?)
}

pub fn load_hermitian(path: &str) -> Result<HermitianMatrix> {
    parse_hermitian(&std::fs::read_to_string(path)?)
}

pub fn load_density(path: &str) -> Result<DensityMatrix> {
    parse_density(&std::fs::read_to_string(path)?)
}

pub fn load_tangent(path: &str) -> Result<TangentVector> {
    parse_tangent(&std::fs::read_to_string(path)?)
}

/// Parses a probability vector from a JSON array like `[0.5, 0.5]`.
pub fn parse_simplex(json: &str) -> Result<SimplexPoint> {
    let v: Vec<f64> = serde_json::from_str(json)?;
    SimplexPoint::new(v)
}

/// Parses a zero-sum tangent from a JSON array like `[1, -1]`.
pub fn parse_simplex_tangent(json: &str) -> Result<SimplexTangent> {
    let v: Vec<f64> = serde_json::from_str(json)?;
    SimplexTangent::new(v)
}

pub fn to_json_string(h: &HermitianMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_hermitian(h)).expect("matrix serialization")
}
