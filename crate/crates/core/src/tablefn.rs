//! User-supplied sampled functions for the CLI (`table:<file>` specs).
//!
//! Samples are interpolated by a cubic Hermite spline in log-x with
//! centered-difference slopes, which keeps the interpolant C¹ — good enough
//! for the characterization and index-estimation screens, not for
//! high-precision kernel work.

use serde::Deserialize;
use std::sync::Arc;

use crate::cm_kernel::C1Fn;
use crate::error::{Error, Result};
use crate::pullback::EmbeddingPair;

#[derive(Debug, Clone)]
pub struct TableFn {
    /// ln of the sample abscissae, strictly increasing
    us: Vec<f64>,
    ys: Vec<f64>,
    /// dy/du slopes at the nodes
    ms: Vec<f64>,
}

impl TableFn {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::Parse(format!(
                "table needs at least 2 matching samples (got {} x, {} y)",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Parse("table abscissae must be positive".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("table abscissae must be increasing".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Parse("table values must be finite".into()));
        }
        let us: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let n = us.len();
        let mut ms = vec![0.0; n];
        ms[0] = (ys[1] - ys[0]) / (us[1] - us[0]);
        ms[n - 1] = (ys[n - 1] - ys[n - 2]) / (us[n - 1] - us[n - 2]);
        for i in 1..n - 1 {
            ms[i] = (ys[i + 1] - ys[i - 1]) / (us[i + 1] - us[i - 1]);
        }
        Ok(Self {
            us,
            ys: ys.to_vec(),
            ms,
        })
    }

    fn segment(&self, u: f64) -> usize {
        match self
            .us
            .binary_search_by(|probe| probe.partial_cmp(&u).unwrap())
        {
            Ok(i) => i.min(self.us.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.us.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let u = x.ln();
        let i = self.segment(u);
        let (u0, u1) = (self.us[i], self.us[i + 1]);
        let h = u1 - u0;
        let t = (u - u0) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.ms[i] * h, self.ms[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// Derivative with respect to x (the spline lives in u = ln x).
    pub fn deriv(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let u = x.ln();
        let i = self.segment(u);
        let (u0, u1) = (self.us[i], self.us[i + 1]);
        let h = u1 - u0;
        let t = (u - u0) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.ms[i] * h, self.ms[i + 1] * h);
        let t2 = t * t;
        let dy_dt = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        dy_dt / h / x
    }

    pub fn to_c1fn(&self) -> C1Fn {
        let a = Arc::new(self.clone());
        let b = a.clone();
        C1Fn::new(move |x| a.eval(x), move |x| b.deriv(x))
    }
}

#[derive(Deserialize)]
struct SingleTable {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Deserialize)]
struct PairTable {
    x: Vec<f64>,
    phi: Vec<f64>,
    chi: Vec<f64>,
}

/// Loads `{"x": [...], "y": [...]}` as a sampled scalar function.
pub fn load_table_fn(path: &str) -> Result<TableFn> {
    let raw: SingleTable = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    TableFn::new(&raw.x, &raw.y)
}

/// Loads `{"x": [...], "phi": [...], "chi": [...]}` as a sampled embedding pair.
pub fn load_table_pair(path: &str) -> Result<EmbeddingPair> {
    let raw: PairTable = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let phi = TableFn::new(&raw.x, &raw.phi)?;
    let chi = TableFn::new(&raw.x, &raw.chi)?;
    Ok(EmbeddingPair::new(
        format!("table:{path}"),
        phi.to_c1fn(),
        chi.to_c1fn(),
    ))
}
