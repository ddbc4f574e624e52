//! CPTP channels from Haar-random isometries, classical stochastic maps, and
//! the contraction trials that probe metric monotonicity.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cm_kernel::MonotoneFunction;
use crate::error::{Error, Result};
use crate::jsonio::MatrixJson;
use crate::metrics::{fisher_info, metric_eval, SimplexPoint, SimplexTangent};
use crate::spectra::{
    random_density_rng, random_tangent_rng, C64, CMatrix, DensityMatrix, HermitianMatrix,
    TangentVector,
};

use super::{stream_rng, MonotonicityVerdict, VerdictStatus, Witness, WITNESS_FLOOR};

/// Relative slack allowed on `g_after ≤ g_before`.
const CONTRACTION_REL_TOL: f64 = 1e-9;
/// Absolute slack allowed on `g_after ≤ g_before`.
const CONTRACTION_ABS_TOL: f64 = 1e-12;

/// A completely positive trace-preserving map given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl QuantumChannel {
    /// Validates `Σ K_r* K_r = I` to 1e-10.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::InvalidParameter {
            name: "kraus",
            message: "need at least one Kraus operator".into(),
        })?;
        let (dim_out, dim_in) = (first.nrows(), first.ncols());
        if kraus
            .iter()
            .any(|k| k.nrows() != dim_out || k.ncols() != dim_in)
        {
            return Err(Error::InvalidParameter {
                name: "kraus",
                message: "all Kraus operators must share one shape".into(),
            });
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let deviation = (sum - CMatrix::identity(dim_in, dim_in)).norm();
        if deviation > 1e-10 {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            kraus,
            dim_in,
            dim_out,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `T(X) = Σ K_r X K_r*`.
    pub fn apply_raw(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    pub fn apply_hermitian(&self, x: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.apply_raw(x.matrix()))
    }

    /// Maps a density matrix; fails if the image drops below the positivity
    /// floor (callers typically resample).
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_hermitian(rho.hermitian()))
    }

    pub fn apply_tangent(&self, a: &TangentVector) -> Result<TangentVector> {
        TangentVector::new(self.apply_hermitian(a.hermitian()))
    }
}

/// `T(X)` for a Hermitian argument.
pub fn apply_channel(t: &QuantumChannel, x: &HermitianMatrix) -> HermitianMatrix {
    t.apply_hermitian(x)
}

/// Haar-random unitary via QR of a Gaussian matrix with the R-diagonal phase
/// fix.
pub(crate) fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    haar_isometry(dim, dim, rng)
}

/// Haar-random isometry: the thin-Q factor of a Gaussian `rows × cols`
/// matrix (`rows ≥ cols`), phase-fixed to make the distribution uniform.
pub(crate) fn haar_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random CPTP map: the Kraus operators are the `dim_out`-row blocks of a
/// Haar-random isometry from `C^{dim_in}` into `C^{dim_out · kraus_rank}`,
/// so trace preservation holds by construction.
pub fn random_cptp(
    dim_in: usize,
    dim_out: usize,
    kraus_rank: usize,
    seed: u64,
) -> Result<QuantumChannel> {
    let mut rng = stream_rng(seed, 0);
    random_cptp_rng(dim_in, dim_out, kraus_rank, &mut rng)
}

pub(crate) fn random_cptp_rng(
    dim_in: usize,
    dim_out: usize,
    kraus_rank: usize,
    rng: &mut ChaCha8Rng,
) -> Result<QuantumChannel> {
    if kraus_rank < 1 || dim_in < 1 || dim_out < 1 {
        return Err(Error::InvalidParameter {
            name: "channel",
            message: "dimensions and Kraus rank must be positive".into(),
        });
    }
    if dim_out * kraus_rank < dim_in {
        return Err(Error::InvalidParameter {
            name: "kraus_rank",
            message: format!(
                "dim_out * kraus_rank = {} cannot embed dim_in = {dim_in}",
                dim_out * kraus_rank
            ),
        });
    }
    let v = haar_isometry(dim_out * kraus_rank, dim_in, rng);
    let kraus = (0..kraus_rank)
        .map(|r| v.rows(r * dim_out, dim_out).into_owned())
        .collect();
    QuantumChannel::new(kraus)
}

/// Evidence for a contraction violation: enough to recompute both metric
/// values from scratch.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionWitness {
    pub rho: MatrixJson,
    pub direction: MatrixJson,
    pub kraus: Vec<MatrixJson>,
    pub before: f64,
    pub after: f64,
    pub violation: f64,
}

struct TrialOutcome {
    excess: f64,
    beyond_tol: bool,
    resamples: usize,
    witness: Option<ContractionWitness>,
}

/// Random contraction trials: draws `(T, ρ, X)`, compares
/// `g(T(ρ); T(X))` against `g(ρ; X)`, and reports any excess beyond
/// tolerance. Images that fall below the positivity floor are resampled and
/// counted.
pub fn contraction_test(
    f: &MonotoneFunction,
    trials: usize,
    dims: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<MonotonicityVerdict> {
    let dims: Vec<usize> = dims.collect();
    if dims.is_empty() || dims[0] < 2 {
        return Err(Error::InvalidParameter {
            name: "dims",
            message: "need dimensions of at least 2".into(),
        });
    }
    let outcomes: Result<Vec<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let dim = dims[trial % dims.len()];
            let mut resamples = 0usize;
            loop {
                let channel = random_cptp_rng(dim, dim, dim, &mut rng)?;
                let rho = random_density_rng(dim, &mut rng);
                let x = random_tangent_rng(dim, &mut rng);
                let rho_out = match channel.apply_density(&rho) {
                    Ok(r) => r,
                    Err(_) => {
                        resamples += 1;
                        continue;
                    }
                };
                let x_out = channel.apply_tangent(&x)?;
                let before = metric_eval(f, &rho, &x, &x)?;
                let after = metric_eval(f, &rho_out, &x_out, &x_out)?;
                let bound = before * (1.0 + CONTRACTION_REL_TOL) + CONTRACTION_ABS_TOL;
                let excess = after - before;
                let beyond_tol = after > bound;
                let witness = beyond_tol.then(|| ContractionWitness {
                    rho: MatrixJson::from_hermitian(rho.hermitian()),
                    direction: MatrixJson::from_hermitian(x.hermitian()),
                    kraus: channel
                        .kraus()
                        .iter()
                        .map(|k| MatrixJson {
                            dim: dim,
                            rows: (0..dim)
                                .map(|i| (0..dim).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect())
                                .collect(),
                        })
                        .collect(),
                    before,
                    after,
                    violation: excess,
                });
                return Ok(TrialOutcome {
                    excess,
                    beyond_tol,
                    resamples,
                    witness,
                });
            }
        })
        .collect();
    let outcomes = outcomes?;

    let violations = outcomes.iter().filter(|o| o.beyond_tol).count();
    let resamples = outcomes.iter().map(|o| o.resamples).sum();
    // most positive excess, sign-flipped so "more negative = worse" matches
    // the eigenvalue-based verdicts
    let worst_excess = outcomes
        .iter()
        .map(|o| o.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst = outcomes
        .iter()
        .filter(|o| o.beyond_tol)
        .max_by(|a, b| a.excess.partial_cmp(&b.excess).unwrap());

    let (status, witness) = match worst {
        None => (VerdictStatus::Pass, None),
        Some(o) => {
            let w = o.witness.clone().expect("violating trial keeps witness");
            let status = if o.excess > WITNESS_FLOOR * w.before.abs().max(1.0) {
                VerdictStatus::Fail
            } else {
                VerdictStatus::Inconclusive
            };
            (status, Some(Witness::Contraction(w)))
        }
    };
    Ok(MonotonicityVerdict {
        test: "contraction",
        function: f.name().to_string(),
        status,
        trials,
        tolerance: CONTRACTION_REL_TOL,
        min_observed: -worst_excess,
        violations,
        resamples,
        witness,
        seed,
    })
}

/// Recomputes both sides of a contraction witness from scratch and returns
/// `(before, after, violation)`.
pub fn recheck_contraction(
    f: &MonotoneFunction,
    w: &ContractionWitness,
) -> Result<(f64, f64, f64)> {
    let rho = DensityMatrix::new(HermitianMatrix::new(w.rho.to_cmatrix()?)?)?;
    let x = TangentVector::new(HermitianMatrix::new(w.direction.to_cmatrix()?)?)?;
    let kraus: Result<Vec<CMatrix>> = w.kraus.iter().map(|k| k.to_cmatrix()).collect();
    let channel = QuantumChannel::new(kraus?)?;
    let rho_out = channel.apply_density(&rho)?;
    let x_out = channel.apply_tangent(&x)?;
    let before = metric_eval(f, &rho, &x, &x)?;
    let after = metric_eval(f, &rho_out, &x_out, &x_out)?;
    Ok((before, after, after - before))
}

/// A column-stochastic matrix acting on probability vectors.
#[derive(Debug, Clone)]
pub struct StochasticMap {
    matrix: nalgebra::DMatrix<f64>,
}

impl StochasticMap {
    pub fn new(matrix: nalgebra::DMatrix<f64>) -> Result<Self> {
        if matrix.iter().any(|&x| x < 0.0) {
            return Err(Error::BadStochastic("negative entry".into()));
        }
        for j in 0..matrix.ncols() {
            let s: f64 = matrix.column(j).iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::BadStochastic(format!(
                    "column {j} sums to {s}, not 1"
                )));
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &nalgebra::DMatrix<f64> {
        &self.matrix
    }

    pub fn apply_point(&self, p: &SimplexPoint) -> Result<SimplexPoint> {
        SimplexPoint::new(self.apply_raw(p.probabilities()))
    }

    pub fn apply_tangent(&self, a: &SimplexTangent) -> Result<SimplexTangent> {
        SimplexTangent::new(self.apply_raw(a.components()))
    }

    fn apply_raw(&self, v: &[f64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.matrix * x).iter().copied().collect()
    }
}

/// The coarse graining that merges coordinates 0 and 1 of an n-point space.
pub fn merge_map(n: usize) -> StochasticMap {
    assert!(n >= 2);
    let mut m = nalgebra::DMatrix::zeros(n - 1, n);
    m[(0, 0)] = 1.0;
    m[(0, 1)] = 1.0;
    for k in 2..n {
        m[(k - 1, k)] = 1.0;
    }
    StochasticMap::new(m).unwrap()
}

/// Classical contraction under the merge map, with the exact amount lost:
/// `g_before - g_after = (A_1 ρ_2 - A_2 ρ_1)² / (ρ_1 ρ_2 (ρ_1 + ρ_2))`.
#[derive(Debug, Clone, Serialize)]
pub struct MergeCheck {
    pub before: f64,
    pub after: f64,
    /// |(before - after) - closed form|
    pub identity_residual: f64,
}

pub fn merge_check(rho: &SimplexPoint, a: &SimplexTangent) -> Result<MergeCheck> {
    let t = merge_map(rho.dim());
    let before = fisher_info(rho, a, a);
    let rho_out = t.apply_point(rho)?;
    let a_out = t.apply_tangent(a)?;
    let after = fisher_info(&rho_out, &a_out, &a_out);
    let (p1, p2) = (rho.probabilities()[0], rho.probabilities()[1]);
    let (a1, a2) = (a.components()[0], a.components()[1]);
    let lost = (a1 * p2 - a2 * p1).powi(2) / (p1 * p2 * (p1 + p2));
    Ok(MergeCheck {
        before,
        after,
        identity_residual: ((before - after) - lost).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm_kernel::{bures, f_wyd, square};
    use crate::spectra::{eigh, random_density, random_tangent};
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_isometry_is_isometric() {
        let mut rng = stream_rng(3, 0);
        let v = haar_isometry(8, 3, &mut rng);
        let gram = v.adjoint() * &v;
        assert!((gram - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn unitary_channel_preserves_spectrum() {
        let t = random_cptp(3, 3, 1, 5).unwrap();
        let rho = random_density(3, 6);
        let out = t.apply_density(&rho).unwrap();
        let before = rho.eigenvalues();
        let after = out.eigenvalues();
        for (x, y) in before.iter().zip(after) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn random_channel_is_cptp_by_construction() {
        for (din, dout, rank, seed) in [(2, 2, 2, 1u64), (3, 2, 3, 2), (2, 4, 1, 3), (4, 3, 4, 4)]
        {
            let t = random_cptp(din, dout, rank, seed).unwrap();
            let rho = random_density(din, seed + 10);
            let out = t.apply_hermitian(rho.hermitian());
            assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-10);
            assert!(eigh(&out).unwrap().min_eigenvalue() > -1e-12);
        }
        assert!(random_cptp(4, 1, 2, 0).is_err());
    }

    #[test]
    fn dephasing_kills_offdiagonals() {
        let k1 = CMatrix::from_fn(2, 2, |i, j| {
            C64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
        });
        let k2 = CMatrix::from_fn(2, 2, |i, j| {
            C64::new(if i == 1 && j == 1 { 1.0 } else { 0.0 }, 0.0)
        });
        let t = QuantumChannel::new(vec![k1, k2]).unwrap();
        let x = HermitianMatrix::pauli_x();
        let out = t.apply_hermitian(&x);
        assert!(out.frobenius_norm() < 1e-14);
    }

    #[test]
    fn unitary_conjugation_preserves_metric() {
        let f = f_wyd(0.5);
        let t = random_cptp(3, 3, 1, 21).unwrap();
        let rho = random_density(3, 22);
        let x = random_tangent(3, 23);
        let before = metric_eval(&f, &rho, &x, &x).unwrap();
        let after = metric_eval(
            &f,
            &t.apply_density(&rho).unwrap(),
            &t.apply_tangent(&x).unwrap(),
            &t.apply_tangent(&x).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(before, after, epsilon = 1e-10 * before);
    }

    #[test]
    fn contraction_holds_for_monotone_candidates() {
        for f in [bures(), f_wyd(0.5)] {
            let v = contraction_test(&f, 300, 2..=4, 31).unwrap();
            assert!(v.passed(), "{} violated contraction: {v:?}", f.name());
        }
    }

    #[test]
    fn contraction_control_finds_square_violation() {
        let v = contraction_test(&square(), 600, 2..=4, 33).unwrap();
        assert_eq!(v.status, VerdictStatus::Fail, "{v:?}");
        if let Some(Witness::Contraction(w)) = &v.witness {
            let (_, _, violation) = recheck_contraction(&square(), w).unwrap();
            assert!((violation - w.violation).abs() <= 0.1 * w.violation.abs());
        } else {
            panic!("expected contraction witness");
        }
    }

    #[test]
    fn merge_identity_is_exact() {
        let rho = SimplexPoint::new(vec![0.5, 0.2, 0.3]).unwrap();
        let a = SimplexTangent::new(vec![0.4, -0.1, -0.3]).unwrap();
        let check = merge_check(&rho, &a).unwrap();
        assert!(check.after <= check.before);
        assert!(check.identity_residual <= 1e-10);
    }

    #[test]
    fn stochastic_map_validation() {
        let bad = nalgebra::DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.4, 0.8]);
        assert!(StochasticMap::new(bad).is_err());
        let neg = nalgebra::DMatrix::from_row_slice(2, 2, &[1.1, 0.0, -0.1, 1.0]);
        assert!(StochasticMap::new(neg).is_err());
    }
}
