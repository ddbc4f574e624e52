//! Embedding pairs (φ, χ), derivatives of matrix functions along tangent
//! directions, paired metrics by pull-back of the Hilbert–Schmidt pairing,
//! and the finite-dimensional N^q duality map on the Amari sphere.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cm_kernel::{cm_eval, split_spec, C1Fn, MonotoneFunction};
use crate::error::{Error, Result};
use crate::metrics::{metric_eval, SimplexPoint, SimplexTangent};
use crate::spectra::{
    mat_fn_with, random_density_rng, random_tangent_rng, CMatrix, DensityMatrix, HermitianMatrix,
    TangentVector,
};

/// Relative eigenvalue-gap threshold below which a divided difference
/// switches to the midpoint derivative.
const DD_SWITCH: f64 = 1e-8;

/// A pair of C¹ embeddings of (0, ∞), each with its derivative.
#[derive(Clone, Debug)]
pub struct EmbeddingPair {
    name: String,
    phi: C1Fn,
    chi: C1Fn,
}

impl EmbeddingPair {
    pub fn new(name: impl Into<String>, phi: C1Fn, chi: C1Fn) -> Self {
        Self {
            name: name.into(),
            phi,
            chi,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self) -> &C1Fn {
        &self.phi
    }

    pub fn chi(&self) -> &C1Fn {
        &self.chi
    }
}

/// The Wigner–Yanase–Dyson pair `(x^p/p, x^{1-p}/(1-p))`, with the
/// logarithmic endpoint `(x, log x)` at p ∈ {0, 1}.
pub fn wyd_pair(p: f64) -> EmbeddingPair {
    if p.abs() < 1e-6 || (1.0 - p).abs() < 1e-6 {
        return log_pair();
    }
    let q = 1.0 - p;
    EmbeddingPair::new(
        format!("wyd-pair:p={p}"),
        C1Fn::new(move |x: f64| x.powf(p) / p, move |x: f64| x.powf(p - 1.0)),
        C1Fn::new(move |x: f64| x.powf(q) / q, move |x: f64| x.powf(-p)),
    )
}

/// The endpoint pair `(x, log x)`.
pub fn log_pair() -> EmbeddingPair {
    EmbeddingPair::new(
        "log",
        C1Fn::new(|x| x, |_| 1.0),
        C1Fn::new(f64::ln, |x| 1.0 / x),
    )
}

/// Pair lookup by string spec: `log`, `p=0.5`, or `wyd:p=0.5`.
pub fn lookup_pair(spec: &str) -> Result<EmbeddingPair> {
    let (name, params) = split_spec(spec)?;
    match name {
        "log" => Ok(log_pair()),
        "wyd" | "wyd-pair" => {
            let p = params
                .iter()
                .find(|(k, _)| k == "p")
                .map(|&(_, v)| v)
                .ok_or_else(|| Error::Parse(format!("pair spec '{spec}' needs p=<value>")))?;
            Ok(wyd_pair(p))
        }
        _ => {
            if let Some(v) = spec.strip_prefix("p=") {
                let p: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value in pair spec '{spec}'")))?;
                Ok(wyd_pair(p))
            } else {
                Err(Error::UnknownSpec(spec.to_string()))
            }
        }
    }
}

/// Divided difference `(f(x) - f(y))/(x - y)`, switching to the midpoint
/// derivative when the relative gap drops below `DD_SWITCH`.
pub fn divided_difference(f: &C1Fn, x: f64, y: f64) -> f64 {
    if (x - y).abs() <= DD_SWITCH * x.abs().max(y.abs()) {
        f.deriv(0.5 * (x + y))
    } else {
        (f.eval(x) - f.eval(y)) / (x - y)
    }
}

/// Candidate kernel of a pair: `ĥφ(x, y) · ĥχ(x, y)`.
pub fn pair_kernel(pair: &EmbeddingPair, x: f64, y: f64) -> f64 {
    divided_difference(&pair.phi, x, y) * divided_difference(&pair.chi, x, y)
}

/// Derivative of the matrix function `φ` at ρ along `A`:
/// `φ'(ρ)A^c + i[φ(ρ), U]`, realised in the eigenbasis as the
/// divided-difference action `(D_ρφ(A))_ij = ĥφ(λ_i, λ_j) Ã_ij`.
pub fn d_embed(phi: &C1Fn, rho: &DensityMatrix, a: &TangentVector) -> Result<HermitianMatrix> {
    assert_eq!(rho.dim(), a.dim(), "dimension mismatch");
    let e = rho.spectrum();
    let n = e.dim();
    let v = &e.vectors;
    let at = v.adjoint() * a.matrix() * v;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let h = divided_difference(phi, e.values[i], e.values[j]);
            if !h.is_finite() {
                return Err(Error::Domain {
                    name: "d_embed".into(),
                    x: e.values[i],
                    value: h,
                });
            }
            out[(i, j)] = at[(i, j)] * Complex64::new(h, 0.0);
        }
    }
    Ok(HermitianMatrix::symmetrized(v * out * v.adjoint()))
}

/// Paired metric `⟨A, B⟩^{φ,χ}_ρ = Tr(D_ρφ(A) · D_ρχ(B))`.
pub fn paired_metric(
    pair: &EmbeddingPair,
    rho: &DensityMatrix,
    a: &TangentVector,
    b: &TangentVector,
) -> Result<f64> {
    let da = d_embed(&pair.phi, rho, a)?;
    let db = d_embed(&pair.chi, rho, b)?;
    Ok((da.matrix() * db.matrix()).trace().re)
}

/// Scalar pairing residual: the maximum over off-diagonal grid pairs of
/// `|c_f(x, y) - ĥφ(x, y)ĥχ(x, y)| / c_f(x, y)`.
pub fn pairing_residual(f: &MonotoneFunction, pair: &EmbeddingPair, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            let c = cm_eval(f, x, y)?;
            let k = pair_kernel(pair, x, y);
            worst = worst.max((c - k).abs() / c.abs());
        }
    }
    Ok(worst)
}

/// Combined scalar/matrix pairing report. The scalar grid test is
/// authoritative; the matrix test cross-checks through random states.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PairingReport {
    pub f: String,
    pub pair: String,
    pub scalar_residual: f64,
    pub matrix_residual: f64,
    pub pass: bool,
}

/// Default scalar grid: 40 log-uniform points on [1e-3, 1e3].
pub fn default_pairing_grid() -> Vec<f64> {
    crate::cm_kernel::log_grid(1e-3, 1e3, 40)
}

pub fn pairing_report(
    f: &MonotoneFunction,
    pair: &EmbeddingPair,
    dims: std::ops::RangeInclusive<usize>,
    trials_per_dim: usize,
    seed: u64,
) -> Result<PairingReport> {
    let scalar = pairing_residual(f, pair, &default_pairing_grid())?;
    let mut matrix = 0.0f64;
    for dim in dims {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (dim as u64) << 32);
        for _ in 0..trials_per_dim {
            let rho = random_density_rng(dim, &mut rng);
            let a = random_tangent_rng(dim, &mut rng);
            let b = random_tangent_rng(dim, &mut rng);
            let g = metric_eval(f, &rho, &a, &b)?;
            let h = paired_metric(pair, &rho, &a, &b)?;
            matrix = matrix.max((g - h).abs() / (1.0 + g.abs()));
        }
    }
    Ok(PairingReport {
        f: f.name().to_string(),
        pair: pair.name().to_string(),
        scalar_residual: scalar,
        matrix_residual: matrix,
        pass: scalar <= 1e-9 && matrix <= 1e-8,
    })
}

/// Data carried by an N^q element: a Hermitian matrix, or a nonnegative
/// vector in commutative mode.
#[derive(Clone, Debug)]
pub enum NqData {
    Matrix(HermitianMatrix),
    Vector(Vec<f64>),
}

/// An element of M_n (or R^n) normed by `‖A‖_{N^q} = (Tr|A|^q)^{1/q} / q`.
#[derive(Clone, Debug)]
pub struct NqVector {
    q: f64,
    data: NqData,
}

impl NqVector {
    pub fn from_matrix(q: f64, m: HermitianMatrix) -> Result<Self> {
        Self::check_q(q)?;
        Ok(Self {
            q,
            data: NqData::Matrix(m),
        })
    }

    pub fn from_vector(q: f64, v: Vec<f64>) -> Result<Self> {
        Self::check_q(q)?;
        Ok(Self {
            q,
            data: NqData::Vector(v),
        })
    }

    fn check_q(q: f64) -> Result<()> {
        if !(q > 1.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                message: format!("N^q norm needs q > 1 (got {q})"),
            });
        }
        Ok(())
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Hölder-dual index q̃ with 1/q + 1/q̃ = 1.
    pub fn dual_index(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    pub fn data(&self) -> &NqData {
        &self.data
    }
}

/// The Amari-sphere point `v = q ρ^{1/q}` of a density matrix.
pub fn amari_embedding(q: f64, rho: &DensityMatrix) -> Result<NqVector> {
    NqVector::check_q(q)?;
    let m = rho.apply_fn(|x| q * x.powf(1.0 / q))?;
    NqVector::from_matrix(q, m)
}

/// `‖v‖_{N^q} = (Tr|A|^q)^{1/q} / q` (entrywise `|v_i|` in vector mode).
pub fn nq_norm(v: &NqVector) -> Result<f64> {
    let q = v.q;
    let sum: f64 = match &v.data {
        NqData::Matrix(m) => {
            let e = crate::spectra::eigh(m)?;
            e.values.iter().map(|l| l.abs().powf(q)).sum()
        }
        NqData::Vector(xs) => xs.iter().map(|x| x.abs().powf(q)).sum(),
    };
    Ok(sum.powf(1.0 / q) / q)
}

/// Duality map on the positive cone: `q ρ^{1/q} ↦ q̃ ρ^{1/q̃}`, computed
/// spectrally as `v ↦ q̃ (v/q)^{q-1}`. Restricted to positive inputs, which
/// covers the Amari-sphere image.
pub fn duality_map(v: &NqVector) -> Result<NqVector> {
    let q = v.q;
    let qd = v.dual_index();
    match &v.data {
        NqData::Matrix(m) => {
            let e = crate::spectra::eigh(m)?;
            let min = e.min_eigenvalue();
            if min <= 0.0 {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
            let mapped = mat_fn_with(&e, |x| qd * (x / q).powf(q - 1.0))?;
            NqVector::from_matrix(qd, mapped)
        }
        NqData::Vector(xs) => {
            if let Some(&bad) = xs.iter().find(|&&x| !(x > 0.0)) {
                return Err(Error::NotPositive {
                    min_eigenvalue: bad,
                });
            }
            let mapped = xs.iter().map(|&x| qd * (x / q).powf(q - 1.0)).collect();
            NqVector::from_vector(qd, mapped)
        }
    }
}

/// Commutative dualised pull-back of the Amari embedding:
/// `Σ_i (ρ_i^{1/q - 1} A_i)(ρ_i^{1/q̃ - 1} B_i)`, which collapses to the
/// Fisher information for every q.
pub fn amari_pullback_commutative(
    rho: &SimplexPoint,
    a: &SimplexTangent,
    b: &SimplexTangent,
    q: f64,
) -> Result<f64> {
    NqVector::check_q(q)?;
    assert_eq!(rho.dim(), a.dim(), "dimension mismatch");
    assert_eq!(rho.dim(), b.dim(), "dimension mismatch");
    let qd = q / (q - 1.0);
    Ok(rho
        .probabilities()
        .iter()
        .zip(a.components().iter().zip(b.components()))
        .map(|(&p, (&ai, &bi))| (p.powf(1.0 / q - 1.0) * ai) * (p.powf(1.0 / qd - 1.0) * bi))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm_kernel::{bkm, bures, f_wyd, log_grid};
    use crate::metrics::fisher_info;
    use crate::spectra::{mat_fn, random_density, random_tangent, HermitianMatrix};
    use approx::assert_abs_diff_eq;

    #[test]
    fn wyd_pair_values() {
        let p = wyd_pair(0.5);
        assert_abs_diff_eq!(p.phi().eval(4.0), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.chi().eval(4.0), 4.0, epsilon = 1e-14);
        let lp = wyd_pair(1.0);
        assert_abs_diff_eq!(lp.chi().eval(std::f64::consts::E), 1.0, epsilon = 1e-14);
        // φ'(x)χ'(x) = 1/x for every member of the family
        for p in [-1.0, -0.5, 0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0] {
            let pair = wyd_pair(p);
            for &x in &log_grid(1e-3, 1e3, 17) {
                let prod = pair.phi().deriv(x) * pair.chi().deriv(x);
                assert!(
                    (prod - 1.0 / x).abs() <= 1e-10 / x,
                    "slope product off at p={p}, x={x}"
                );
            }
        }
    }

    #[test]
    fn d_embed_identity_and_commuting() {
        let rho = random_density(3, 9);
        let a = random_tangent(3, 10);
        let id = C1Fn::new(|x| x, |_| 1.0);
        let out = d_embed(&id, &rho, &a).unwrap();
        assert!((out.matrix() - a.matrix()).norm() < 1e-12);

        // commuting case: D_ρφ(A) = φ'(ρ) A
        let rho_d = DensityMatrix::from_probabilities(&[0.6, 0.4]).unwrap();
        let a_d = TangentVector::new(HermitianMatrix::pauli_z()).unwrap();
        let sq = C1Fn::new(|x: f64| 2.0 * x.sqrt(), |x: f64| 1.0 / x.sqrt());
        let out = d_embed(&sq, &rho_d, &a_d).unwrap();
        assert_abs_diff_eq!(out.entry(0, 0).re, 1.0 / 0.6f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(out.entry(1, 1).re, -1.0 / 0.4f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn d_embed_offdiagonal_factor() {
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        let a = TangentVector::new(HermitianMatrix::pauli_x()).unwrap();
        let sq = C1Fn::new(|x: f64| 2.0 * x.sqrt(), |x: f64| 1.0 / x.sqrt());
        let out = d_embed(&sq, &rho, &a).unwrap();
        let expected = 2.0 * (0.9f64.sqrt() - 0.1f64.sqrt()) / 0.8;
        assert_abs_diff_eq!(out.entry(0, 1).re, expected, epsilon = 1e-12);
    }

    #[test]
    fn d_embed_matches_finite_differences() {
        // D_ρφ(A) against central differences of t ↦ φ(ρ + tA); the state is
        // mixed toward I/n so the finite-difference truncation error (which
        // grows like λ_min^{-5/2} for the square root) stays below tolerance
        let phi = C1Fn::new(|x: f64| 2.0 * x.sqrt(), |x: f64| 1.0 / x.sqrt());
        for (dim, seed) in [(2, 21u64), (3, 22), (4, 23), (6, 24)] {
            let raw = random_density(dim, seed);
            let mixed = raw
                .hermitian()
                .scaled(0.5)
                .add(&DensityMatrix::maximally_mixed(dim).hermitian().scaled(0.5));
            let rho = DensityMatrix::new(mixed).unwrap();
            let a = random_tangent(dim, seed + 50);
            let analytic = d_embed(&phi, &rho, &a).unwrap();
            let t = 1e-5;
            let shifted = |s: f64| {
                let m = rho.matrix() + a.matrix().scale(s);
                mat_fn(
                    &HermitianMatrix::symmetrized(m),
                    |x| 2.0 * x.sqrt(),
                )
                .unwrap()
            };
            let fd = shifted(t).sub(&shifted(-t)).scaled(1.0 / (2.0 * t));
            assert!(
                (analytic.matrix() - fd.matrix()).norm() <= 1e-6,
                "chain rule mismatch dim {dim}"
            );
        }
    }

    #[test]
    fn paired_metric_values() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = TangentVector::new(HermitianMatrix::pauli_x()).unwrap();
        assert_abs_diff_eq!(
            paired_metric(&log_pair(), &rho, &a, &a).unwrap(),
            4.0,
            epsilon = 1e-12
        );

        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(
            paired_metric(&wyd_pair(0.5), &rho, &a, &a).unwrap(),
            5.0,
            epsilon = 1e-12
        );

        let zero = TangentVector::new(HermitianMatrix::zeros(2)).unwrap();
        assert_abs_diff_eq!(
            paired_metric(&wyd_pair(0.5), &rho, &zero, &a).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn pairing_residuals() {
        let grid = default_pairing_grid();
        assert!(pairing_residual(&f_wyd(0.5), &wyd_pair(0.5), &grid).unwrap() <= 1e-9);
        assert!(pairing_residual(&bkm(), &log_pair(), &grid).unwrap() <= 1e-9);
        // mismatched combination: at (4, 1) the kernels are 0.4 vs 4/9
        assert!(pairing_residual(&bures(), &wyd_pair(0.5), &grid).unwrap() > 0.01);
    }

    #[test]
    fn pairing_report_matrix_route() {
        let rep = pairing_report(&f_wyd(0.5), &wyd_pair(0.5), 2..=4, 40, 3).unwrap();
        assert!(rep.pass, "report failed: {rep:?}");
        let bad = pairing_report(&bures(), &wyd_pair(0.5), 2..=3, 20, 3).unwrap();
        assert!(!bad.pass);
        assert!(bad.matrix_residual > 1e-3);
    }

    #[test]
    fn k_homogeneity_for_wyd_pairs() {
        for p in [-1.0, -0.25, 0.5, 1.25, 2.0] {
            let pair = wyd_pair(p);
            let k = |x: f64, y: f64| {
                (pair.phi().eval(x) - pair.phi().eval(y))
                    * (pair.chi().eval(x) - pair.chi().eval(y))
            };
            for &(x, y, t) in &[(2.0, 1.0, 10.0), (0.03, 5.0, 0.2), (40.0, 0.7, 3.5)] {
                let lhs = k(t * x, t * y);
                let rhs = t * k(x, y);
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * rhs.abs(),
                    "k not 1-homogeneous at p={p}"
                );
            }
        }
    }

    #[test]
    fn nq_norm_and_duality() {
        // q = 2 is the self-dual Hilbert case
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        let v = amari_embedding(2.0, &rho).unwrap();
        assert_abs_diff_eq!(nq_norm(&v).unwrap(), 1.0, epsilon = 1e-12);
        let jv = duality_map(&v).unwrap();
        if let (NqData::Matrix(m), NqData::Matrix(jm)) = (v.data(), jv.data()) {
            assert!((m.matrix() - jm.matrix()).norm() < 1e-12);
        } else {
            panic!("expected matrix data");
        }

        // q = 4 at the maximally mixed qubit state
        let rho = DensityMatrix::maximally_mixed(2);
        let v = amari_embedding(4.0, &rho).unwrap();
        let jv = duality_map(&v).unwrap();
        assert_abs_diff_eq!(jv.q(), 4.0 / 3.0, epsilon = 1e-14);
        if let NqData::Matrix(jm) = jv.data() {
            let expected = (4.0 / 3.0) * 0.5f64.powf(0.75);
            assert_abs_diff_eq!(jm.entry(0, 0).re, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(jm.entry(1, 1).re, expected, epsilon = 1e-12);
        }

        // unit-sphere pairing ⟨v/q, J(v)/q̃⟩ = 1 and the norm stays 1
        for (q, seed) in [(1.5, 31u64), (2.0, 32), (3.0, 33), (10.0, 34)] {
            let rho = random_density(3, seed);
            let v = amari_embedding(q, &rho).unwrap();
            let jv = duality_map(&v).unwrap();
            assert_abs_diff_eq!(nq_norm(&v).unwrap(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(nq_norm(&jv).unwrap(), 1.0, epsilon = 1e-10);
            if let (NqData::Matrix(m), NqData::Matrix(jm)) = (v.data(), jv.data()) {
                let pairing = crate::spectra::hs_inner(
                    &m.scaled(1.0 / q),
                    &jm.scaled(1.0 / jv.q()),
                )
                .unwrap();
                assert_abs_diff_eq!(pairing, 1.0, epsilon = 1e-10);
            }

            // involution: the double dual returns the original sphere point
            let back = duality_map(&jv).unwrap();
            if let (NqData::Matrix(m), NqData::Matrix(bm)) = (v.data(), back.data()) {
                assert!((m.matrix() - bm.matrix()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn duality_rejects_indefinite_input() {
        let v = NqVector::from_matrix(2.0, HermitianMatrix::pauli_z()).unwrap();
        assert!(matches!(
            duality_map(&v),
            Err(Error::NotPositive { .. })
        ));
        assert!(NqVector::from_matrix(1.0, HermitianMatrix::pauli_z()).is_err());
    }

    #[test]
    fn commutative_pullback_is_fisher() {
        let rho = SimplexPoint::new(vec![0.9, 0.1]).unwrap();
        let a = SimplexTangent::new(vec![1.0, -1.0]).unwrap();
        assert_abs_diff_eq!(
            amari_pullback_commutative(&rho, &a, &a, 5.0).unwrap(),
            100.0 / 9.0,
            epsilon = 1e-10
        );
        let uniform = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        for q in [1.5, 2.0, 3.0, 10.0] {
            assert_abs_diff_eq!(
                amari_pullback_commutative(&uniform, &a, &a, q).unwrap(),
                4.0,
                epsilon = 1e-12
            );
        }
        // q-independence on an uneven point
        let rho = SimplexPoint::new(vec![0.2, 0.45, 0.35]).unwrap();
        let a = SimplexTangent::new(vec![0.3, -0.4, 0.1]).unwrap();
        let b = SimplexTangent::new(vec![-0.25, 0.05, 0.2]).unwrap();
        let g2 = amari_pullback_commutative(&rho, &a, &b, 2.0).unwrap();
        let g3 = amari_pullback_commutative(&rho, &a, &b, 3.0).unwrap();
        assert_abs_diff_eq!(g2, g3, epsilon = 1e-12 * (1.0 + g2.abs()));
        assert_abs_diff_eq!(g2, fisher_info(&rho, &a, &b), epsilon = 1e-12);
    }

    #[test]
    fn derivative_identity_is_a_consequence() {
        // every pair passing the scalar residual against some catalog f must
        // satisfy φ'(x)χ'(x) = 1/x
        let grid = default_pairing_grid();
        for p in [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0] {
            let pair = wyd_pair(p);
            let f = f_wyd(p);
            if pairing_residual(&f, &pair, &grid).unwrap() <= 1e-9 {
                for &x in &grid {
                    let prod = pair.phi().deriv(x) * pair.chi().deriv(x);
                    assert!((prod - 1.0 / x).abs() <= 1e-10 / x);
                }
            } else {
                panic!("expected (f_p, pair_p) to pass at p={p}");
            }
        }
    }
}
