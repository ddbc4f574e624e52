//! Regular-variation index estimation: for `h` with `h(tx)/h(x) → t^p` at the
//! limit point, the log-ratio `log(h(tx)/h(x)) / log t` settles on `p` along a
//! geometric sequence. The plateau spread is reported, so slowly varying
//! corrections show up as stderr instead of being hidden.

use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pullback::wyd_pair;

/// Which limit point the sequence approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Zero,
    Infinity,
}

impl Side {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" | "origin" => Ok(Self::Zero),
            "infinity" | "inf" => Ok(Self::Infinity),
            _ => Err(Error::Parse(format!(
                "side must be 'zero' or 'infinity' (got '{s}')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RVSample {
    pub x: f64,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RVEstimate {
    pub index_p: f64,
    pub stderr: f64,
    pub samples: Vec<RVSample>,
}

/// Multipliers probed for the defining limit.
pub fn default_t_grid() -> Vec<f64> {
    vec![2.0, 5.0, 10.0]
}

/// 20-term geometric sequence with ratio 10 headed toward the requested
/// limit point. It starts at 1e-2 (resp. 1e2) so that `t·x` stays clear of
/// x = 1 for every default multiplier.
pub fn default_x_sequence(side: Side) -> Vec<f64> {
    (2..=21)
        .map(|k| match side {
            Side::Zero => 10f64.powi(-k),
            Side::Infinity => 10f64.powi(k),
        })
        .collect()
}

/// Number of trailing x-values treated as the plateau.
const PLATEAU: usize = 5;

pub fn rv_index(
    h: &dyn Fn(f64) -> f64,
    side: Side,
    t_grid: Option<&[f64]>,
    x_sequence: Option<&[f64]>,
) -> Result<RVEstimate> {
    let default_t;
    let t_grid = match t_grid {
        Some(t) => t,
        None => {
            default_t = default_t_grid();
            &default_t
        }
    };
    let default_x;
    let xs = match x_sequence {
        Some(x) => x,
        None => {
            default_x = default_x_sequence(side);
            &default_x
        }
    };
    if xs.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "rv_index",
            message: "need at least one t and one x sample".into(),
        });
    }
    if t_grid.iter().any(|&t| !(t > 0.0) || (t - 1.0).abs() < 1e-12) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            message: "multipliers must be positive and different from 1".into(),
        });
    }

    let mut samples = Vec::with_capacity(t_grid.len() * xs.len());
    let mut plateau = Vec::new();
    let plateau_start = xs.len().saturating_sub(PLATEAU);
    for &t in t_grid {
        for (k, &x) in xs.iter().enumerate() {
            let hx = h(x);
            let htx = h(t * x);
            if !(hx > 0.0) || !(htx > 0.0) || !hx.is_finite() || !htx.is_finite() {
                return Err(Error::Domain {
                    name: "rv_index".into(),
                    x,
                    value: hx,
                });
            }
            let ratio = (htx / hx).ln() / t.ln();
            samples.push(RVSample { x, t, ratio });
            if k >= plateau_start {
                plateau.push(ratio);
            }
        }
    }
    let n = plateau.len() as f64;
    let mean = plateau.iter().sum::<f64>() / n;
    let stderr = if plateau.len() > 1 {
        (plateau.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RVEstimate {
        index_p: mean,
        stderr,
        samples,
    })
}

/// Named test functions for the CLI: `pow:p=..`, `powlog:p=..`, `loginv`,
/// `pair-product:p=..`.
pub fn lookup_h(spec: &str) -> Result<(String, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> {
    let (name, params) = crate::cm_kernel::split_spec(spec)?;
    let p = params.iter().find(|(k, _)| k == "p").map(|&(_, v)| v);
    let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match name {
        "pow" => {
            let p = p.ok_or_else(|| Error::Parse(format!("spec '{spec}' needs p=<value>")))?;
            Arc::new(move |x: f64| x.powf(p))
        }
        "powlog" => {
            let p = p.ok_or_else(|| Error::Parse(format!("spec '{spec}' needs p=<value>")))?;
            Arc::new(move |x: f64| x.powf(p) * (1.0 + x.ln().abs()))
        }
        "loginv" => Arc::new(|x: f64| (1.0 / x).ln()),
        "pair-product" => {
            let p = p.ok_or_else(|| Error::Parse(format!("spec '{spec}' needs p=<value>")))?;
            let pair = wyd_pair(p);
            Arc::new(move |x: f64| pair.phi().eval(x) * pair.chi().eval(x))
        }
        _ => return Err(Error::UnknownSpec(spec.to_string())),
    };
    Ok((spec.to_string(), f))
}
