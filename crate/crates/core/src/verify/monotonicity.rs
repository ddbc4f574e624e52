//! Operator-monotonicity certification: positive semidefiniteness of sampled
//! Loewner matrices, and random searches for order violations `0 ≤ A ≤ B`
//! with `f(B) - f(A)` not PSD.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cm_kernel::MonotoneFunction;
use crate::error::{Error, Result};
use crate::jsonio::MatrixJson;
use crate::spectra::{eigh, mat_fn, HermitianMatrix};

use super::{
    channel::haar_unitary, stream_rng, MonotonicityVerdict, VerdictStatus, Witness, PSD_TOL,
    WITNESS_FLOOR,
};

/// Sampling range for Loewner points and matrix spectra.
const LOG_RANGE: (f64, f64) = (-3.0, 3.0);
/// Minimum relative gap between Loewner points; closer sets are resampled to
/// keep the divided differences well conditioned.
const MIN_REL_GAP: f64 = 1e-6;

pub(crate) fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(LOG_RANGE.0..LOG_RANGE.1))
}

fn min_eigenvalue_sym(m: &DMatrix<f64>) -> Result<f64> {
    let values = crate::spectra::eigvals_symmetric(m)?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// Loewner matrix of `f` on a point set: `L_ij = (f(x_i) - f(x_j))/(x_i - x_j)`
/// with `L_ii = f'(x_i)`.
pub fn loewner_matrix(f: &MonotoneFunction, points: &[f64]) -> Result<DMatrix<f64>> {
    let n = points.len();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                f.deriv(points[i])
            } else {
                (f.eval(points[i]) - f.eval(points[j])) / (points[i] - points[j])
            };
            if !v.is_finite() {
                return Err(Error::Domain {
                    name: f.name().to_string(),
                    x: points[i],
                    value: v,
                });
            }
            l[(i, j)] = v;
        }
    }
    Ok(l)
}

fn sample_point_set(n_points: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    'outer: loop {
        let mut pts: Vec<f64> = (0..n_points).map(|_| log_uniform(rng)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in pts.windows(2) {
            if (w[1] - w[0]).abs() <= MIN_REL_GAP * w[1] {
                continue 'outer;
            }
        }
        return pts;
    }
}

struct SetOutcome {
    min_eig: f64,
    violation: f64,
    beyond_tol: bool,
    points: Vec<f64>,
}

/// Samples `n_sets` point sets and checks each Loewner matrix for positive
/// semidefiniteness. Operator monotone functions pass every set; a matrix
/// with an eigenvalue below `-max(WITNESS_FLOOR, tol)` is a failure witness.
pub fn loewner_test(
    f: &MonotoneFunction,
    n_points: usize,
    n_sets: usize,
    seed: u64,
) -> Result<MonotonicityVerdict> {
    if n_points < 2 {
        return Err(Error::InvalidParameter {
            name: "n_points",
            message: "need at least 2 points".into(),
        });
    }
    let outcomes: Result<Vec<SetOutcome>> = (0..n_sets)
        .into_par_iter()
        .map(|set| {
            let mut rng = stream_rng(seed, set as u64);
            let points = sample_point_set(n_points, &mut rng);
            let l = loewner_matrix(f, &points)?;
            let min_eig = min_eigenvalue_sym(&l)?;
            let violation = (-min_eig).max(0.0);
            Ok(SetOutcome {
                min_eig,
                violation,
                beyond_tol: violation > PSD_TOL * l.norm().max(1.0),
                points,
            })
        })
        .collect();
    let outcomes = outcomes?;

    let min_observed = outcomes
        .iter()
        .map(|o| o.min_eig)
        .fold(f64::INFINITY, f64::min);
    let violations = outcomes.iter().filter(|o| o.beyond_tol).count();
    let worst = outcomes
        .iter()
        .filter(|o| o.beyond_tol)
        .max_by(|a, b| a.violation.partial_cmp(&b.violation).unwrap());

    let (status, witness) = match worst {
        None => (VerdictStatus::Pass, None),
        Some(o) => {
            let status = if o.violation > WITNESS_FLOOR {
                VerdictStatus::Fail
            } else {
                VerdictStatus::Inconclusive
            };
            (
                status,
                Some(Witness::LoewnerSet {
                    points: o.points.clone(),
                    min_eigenvalue: o.min_eig,
                    violation: o.violation,
                }),
            )
        }
    };
    Ok(MonotonicityVerdict {
        test: "loewner",
        function: f.name().to_string(),
        status,
        trials: n_sets,
        tolerance: PSD_TOL,
        min_observed,
        violations,
        resamples: 0,
        witness,
        seed,
    })
}

/// Rebuilds the Loewner matrix of a witness point set from scratch and
/// returns `(min eigenvalue, violation)`.
pub fn recheck_loewner(f: &MonotoneFunction, points: &[f64]) -> Result<(f64, f64)> {
    let l = loewner_matrix(f, points)?;
    let min_eig = min_eigenvalue_sym(&l)?;
    Ok((min_eig, (-min_eig).max(0.0)))
}

fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let u = haar_unitary(dim, rng);
    let n = dim;
    let mut d = crate::spectra::CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = crate::spectra::C64::new(log_uniform(rng), 0.0);
    }
    HermitianMatrix::symmetrized(&u * d * u.adjoint())
}

struct PairOutcome {
    min_eig: f64,
    violation: f64,
    beyond_tol: bool,
    pair: Option<(HermitianMatrix, HermitianMatrix)>,
}

/// Random search for order violations: draws pairs `0 ≤ A ≤ B` (with
/// `B = A + P`, `P` PSD) across the dimension range and checks the minimum
/// eigenvalue of `f(B) - f(A)`.
pub fn opmono_matrix_search(
    f: &MonotoneFunction,
    dims: std::ops::RangeInclusive<usize>,
    trials: usize,
    seed: u64,
) -> Result<MonotonicityVerdict> {
    let dims: Vec<usize> = dims.collect();
    if dims.is_empty() || dims[0] < 2 {
        return Err(Error::InvalidParameter {
            name: "dims",
            message: "need dimensions of at least 2".into(),
        });
    }
    let outcomes: Result<Vec<PairOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let dim = dims[trial % dims.len()];
            let a = random_psd(dim, &mut rng);
            let p = random_psd(dim, &mut rng);
            let b = a.add(&p);
            let fa = mat_fn(&a, |x| f.eval(x))?;
            let fb = mat_fn(&b, |x| f.eval(x))?;
            let diff = fb.sub(&fa);
            let min_eig = eigh(&diff)?.min_eigenvalue();
            let violation = (-min_eig).max(0.0);
            let beyond_tol = violation > PSD_TOL * diff.frobenius_norm().max(1.0);
            Ok(PairOutcome {
                min_eig,
                violation,
                beyond_tol,
                pair: beyond_tol.then_some((a, b)),
            })
        })
        .collect();
    let outcomes = outcomes?;

    let min_observed = outcomes
        .iter()
        .map(|o| o.min_eig)
        .fold(f64::INFINITY, f64::min);
    let violations = outcomes.iter().filter(|o| o.beyond_tol).count();
    let worst = outcomes
        .iter()
        .filter(|o| o.beyond_tol)
        .max_by(|a, b| a.violation.partial_cmp(&b.violation).unwrap());

    let (status, witness) = match worst {
        None => (VerdictStatus::Pass, None),
        Some(o) => {
            let (a, b) = o.pair.as_ref().expect("beyond-tolerance outcome keeps pair");
            let status = if o.violation > WITNESS_FLOOR {
                VerdictStatus::Fail
            } else {
                VerdictStatus::Inconclusive
            };
            (
                status,
                Some(Witness::MatrixPair {
                    a: MatrixJson::from_hermitian(a),
                    b: MatrixJson::from_hermitian(b),
                    min_eigenvalue: o.min_eig,
                    violation: o.violation,
                }),
            )
        }
    };
    Ok(MonotonicityVerdict {
        test: "matrix-order",
        function: f.name().to_string(),
        status,
        trials,
        tolerance: PSD_TOL,
        min_observed,
        violations,
        resamples: 0,
        witness,
        seed,
    })
}

/// Recomputes `f(B) - f(A)` for a witness pair and returns
/// `(min eigenvalue, violation)`.
pub fn recheck_matrix_pair(
    f: &MonotoneFunction,
    a: &MatrixJson,
    b: &MatrixJson,
) -> Result<(f64, f64)> {
    let a = HermitianMatrix::new(a.to_cmatrix()?)?;
    let b = HermitianMatrix::new(b.to_cmatrix()?)?;
    let fa = mat_fn(&a, |x| f.eval(x))?;
    let fb = mat_fn(&b, |x| f.eval(x))?;
    let min_eig = eigh(&fb.sub(&fa))?.min_eigenvalue();
    Ok((min_eig, (-min_eig).max(0.0)))
}

/// One row of the interpolating-power-family scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PowerScanRow {
    pub nu: f64,
    pub loewner: MonotonicityVerdict,
    pub matrix_search: MonotonicityVerdict,
}

/// Runs both monotonicity tests for `((1 + x^{1/ν})/2)^ν` across a ν grid.
pub fn power_family_scan(nu_grid: &[f64], seed: u64) -> Result<Vec<PowerScanRow>> {
    nu_grid
        .iter()
        .map(|&nu| {
            let f = crate::cm_kernel::power(nu)?;
            Ok(PowerScanRow {
                nu,
                loewner: loewner_test(&f, 8, 200, seed)?,
                matrix_search: opmono_matrix_search(&f, 2..=4, 400, seed ^ 0x9e37)?,
            })
        })
        .collect()
}
