//! Monotone metric evaluation in the eigenbasis of ρ, the
//! Wigner–Yanase–Dyson information, and the classical Fisher information.
//!
//! Metric values are computed entrywise with the kernel `c_f(λ_i, λ_j)` —
//! never by assembling the n²×n² superoperator — and are reported
//! unnormalised beyond the convention f(1) = 1.

use num_complex::Complex64;

use crate::cm_kernel::{cm_eval, MonotoneFunction};
use crate::error::{Error, Result};
use crate::spectra::{CMatrix, DensityMatrix, HermitianMatrix, TangentVector};

/// A strictly positive probability vector.
#[derive(Debug, Clone)]
pub struct SimplexPoint {
    p: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::BadSimplex("empty vector".into()));
        }
        if let Some(&bad) = p.iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::BadSimplex(format!(
                "entries must be strictly positive (got {bad})"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadSimplex(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self { p })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }
}

/// A zero-sum vector: a tangent direction on the probability simplex.
#[derive(Debug, Clone)]
pub struct SimplexTangent {
    a: Vec<f64>,
}

impl SimplexTangent {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        let sum: f64 = a.iter().sum();
        if sum.abs() > 1e-12 {
            return Err(Error::BadSimplex(format!(
                "tangent components sum to {sum}, not 0"
            )));
        }
        Ok(Self { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.a
    }
}

/// `c_f(L_ρ, R_ρ)(B)`: entrywise kernel multiplication in the eigenbasis of
/// ρ, rotated back. Hermitian whenever `B` is and `f` is symmetric.
pub fn apply_cm_superoperator(
    f: &MonotoneFunction,
    rho: &DensityMatrix,
    b: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    assert_eq!(rho.dim(), b.dim(), "dimension mismatch");
    let e = rho.spectrum();
    let n = e.dim();
    let v = &e.vectors;
    let bt = v.adjoint() * b.matrix() * v;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let c = cm_eval(f, e.values[i], e.values[j])?;
            out[(i, j)] = bt[(i, j)] * Complex64::new(c, 0.0);
        }
    }
    Ok(HermitianMatrix::symmetrized(v * out * v.adjoint()))
}

/// Monotone metric `g^f_ρ(A, B) = Tr(A · c_f(L_ρ, R_ρ)(B))`, evaluated as
/// `Σ_ij c_f(λ_i, λ_j) conj(Ã_ij) B̃_ij` in the eigenbasis of ρ.
pub fn metric_eval(
    f: &MonotoneFunction,
    rho: &DensityMatrix,
    a: &TangentVector,
    b: &TangentVector,
) -> Result<f64> {
    assert_eq!(rho.dim(), a.dim(), "dimension mismatch");
    assert_eq!(rho.dim(), b.dim(), "dimension mismatch");
    let e = rho.spectrum();
    let n = e.dim();
    let v = &e.vectors;
    let at = v.adjoint() * a.matrix() * v;
    let bt = v.adjoint() * b.matrix() * v;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let c = cm_eval(f, e.values[i], e.values[j])?;
            acc += at[(i, j)].conj() * bt[(i, j)] * Complex64::new(c, 0.0);
        }
    }
    Ok(acc.re)
}

/// Wigner–Yanase–Dyson information
/// `I_p(ρ, A) = -Tr([ρ^p, A][ρ^{1-p}, A])`, evaluated spectrally as
/// `Σ_ij (λ_i^p - λ_j^p)(λ_i^{1-p} - λ_j^{1-p}) |Ã_ij|²`.
///
/// At p ∈ {0, 1} the limit form `-Tr([ρ, A][log ρ, A])` is used, keeping the
/// family continuous at the BKM endpoint.
pub fn wyd_info(p: f64, rho: &DensityMatrix, a: &HermitianMatrix) -> f64 {
    assert_eq!(rho.dim(), a.dim(), "dimension mismatch");
    let e = rho.spectrum();
    let n = e.dim();
    let v = &e.vectors;
    let at = v.adjoint() * a.matrix() * v;
    let endpoint = p.abs() < 1e-6 || (1.0 - p).abs() < 1e-6;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (e.values[i], e.values[j]);
            let weight = if endpoint {
                (li - lj) * (li.ln() - lj.ln())
            } else {
                (li.powf(p) - lj.powf(p)) * (li.powf(1.0 - p) - lj.powf(1.0 - p))
            };
            acc += weight * at[(i, j)].norm_sqr();
        }
    }
    acc
}

/// Classical Fisher information `Σ_i A_i B_i / ρ_i`.
pub fn fisher_info(rho: &SimplexPoint, a: &SimplexTangent, b: &SimplexTangent) -> f64 {
    assert_eq!(rho.dim(), a.dim(), "dimension mismatch");
    assert_eq!(rho.dim(), b.dim(), "dimension mismatch");
    rho.probabilities()
        .iter()
        .zip(a.components().iter().zip(b.components()))
        .map(|(&p, (&ai, &bi))| ai * bi / p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm_kernel::{self, catalog, f_wyd};
    use crate::spectra::{
        self, eigh, i_commutator, mat_fn, random_density, random_tangent, HermitianMatrix,
    };
    use approx::assert_abs_diff_eq;

    #[test]
    fn superoperator_scalar_density() {
        let rho = DensityMatrix::maximally_mixed(3);
        let b = random_tangent(3, 1).hermitian().clone();
        let out = apply_cm_superoperator(&f_wyd(0.5), &rho, &b).unwrap();
        assert!((out.matrix() - b.matrix().scale(3.0)).norm() < 1e-10);
    }

    #[test]
    fn superoperator_commuting_is_inverse_scaling() {
        let rho = DensityMatrix::from_probabilities(&[0.6, 0.3, 0.1]).unwrap();
        let b = HermitianMatrix::from_real(&[
            &[2.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0],
            &[0.0, 0.0, 0.5],
        ])
        .unwrap();
        let out = apply_cm_superoperator(&cm_kernel::bkm(), &rho, &b).unwrap();
        for (i, &p) in [0.6, 0.3, 0.1].iter().enumerate() {
            assert_abs_diff_eq!(out.entry(i, i).re, b.entry(i, i).re / p, epsilon = 1e-10);
        }
    }

    #[test]
    fn superoperator_offdiagonal_scaling() {
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        let out = apply_cm_superoperator(&f_wyd(0.5), &rho, &HermitianMatrix::pauli_x()).unwrap();
        // c_{1/2}(0.9, 0.1) = 4/(√0.9 + √0.1)² = 2.5 exactly
        assert_abs_diff_eq!(out.entry(0, 1).re, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.entry(0, 0).re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn metric_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = TangentVector::new(HermitianMatrix::pauli_x()).unwrap();
        for f in catalog() {
            assert_abs_diff_eq!(metric_eval(&f, &rho, &a, &a).unwrap(), 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn metric_spot_value() {
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        let a = TangentVector::new(HermitianMatrix::pauli_x()).unwrap();
        let g = metric_eval(&f_wyd(0.5), &rho, &a, &a).unwrap();
        assert_abs_diff_eq!(g, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn metric_commuting_reduces_to_inverse_weighted_trace() {
        // independent of f: c(λ, λ) = 1/λ
        let rho = DensityMatrix::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
        let a = TangentVector::new(
            HermitianMatrix::from_real(&[
                &[1.0, 0.0, 0.0],
                &[0.0, -2.0, 0.0],
                &[0.0, 0.0, 1.0],
            ])
            .unwrap(),
        )
        .unwrap();
        let expected = 1.0 / 0.5 + 4.0 / 0.3 + 1.0 / 0.2;
        for f in catalog() {
            assert_abs_diff_eq!(
                metric_eval(&f, &rho, &a, &a).unwrap(),
                expected,
                epsilon = 1e-10 * expected
            );
        }
    }

    #[test]
    fn metric_positivity_and_basis_invariance() {
        let funcs = catalog();
        for dim in 2..=6 {
            for seed in 0..20u64 {
                let rho = random_density(dim, 1000 + seed);
                let a = random_tangent(dim, 2000 + seed);
                // conjugate everything by the eigenbasis of an unrelated matrix
                let u = eigh(&spectra::random_hermitian(dim, 3000 + seed))
                    .unwrap()
                    .vectors;
                let rho_u = DensityMatrix::new(HermitianMatrix::symmetrized(
                    &u * rho.matrix() * u.adjoint(),
                ))
                .unwrap();
                let a_u =
                    TangentVector::new(HermitianMatrix::symmetrized(&u * a.matrix() * u.adjoint()))
                        .unwrap();
                for f in &funcs {
                    let g = metric_eval(f, &rho, &a, &a).unwrap();
                    assert!(g > 0.0, "{} not positive (dim {dim})", f.name());
                    let gu = metric_eval(f, &rho_u, &a_u, &a_u).unwrap();
                    assert!(
                        (g - gu).abs() <= 1e-9 * (1.0 + g.abs()),
                        "{} not basis invariant: {g} vs {gu}",
                        f.name()
                    );
                }
            }
        }
    }

    #[test]
    fn wyd_info_commuting_vanishes() {
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(
            wyd_info(0.5, &rho, &HermitianMatrix::pauli_z()),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn wyd_info_spot_value_and_scaling() {
        let rho = DensityMatrix::from_probabilities(&[0.9, 0.1]).unwrap();
        let a = HermitianMatrix::pauli_x();
        // 2(√0.9 - √0.1)² = 2(1 - 2√0.09) = 0.8 exactly
        let v = wyd_info(0.5, &rho, &a);
        assert_abs_diff_eq!(v, 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(wyd_info(0.5, &rho, &a.scaled(2.0)), 4.0 * v, epsilon = 1e-13);
    }

    #[test]
    fn wyd_info_matches_commutator_trace_oracle() {
        // independent route: build ρ^p, ρ^{1-p}, the commutators, and trace
        for (dim, seed, p) in [(2, 5u64, 0.3), (3, 6, 0.5), (4, 7, 0.7), (3, 8, 1.5)] {
            let rho = random_density(dim, seed);
            let a = random_tangent(dim, seed + 100).hermitian().clone();
            let rp = mat_fn(rho.hermitian(), |x| x.powf(p)).unwrap();
            let rq = mat_fn(rho.hermitian(), |x| x.powf(1.0 - p)).unwrap();
            let c1 = rp.matrix() * a.matrix() - a.matrix() * rp.matrix();
            let c2 = rq.matrix() * a.matrix() - a.matrix() * rq.matrix();
            let oracle = -(&c1 * &c2).trace().re;
            let fast = wyd_info(p, &rho, &a);
            assert!(
                (fast - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "wyd_info mismatch dim {dim}: {fast} vs {oracle}"
            );
        }
    }

    #[test]
    fn wyd_bridge_to_metric() {
        // for B = i[ρ, U]: g_p(B, B) = I_p(ρ, U) / (p(1-p))
        for p in [-0.5, 0.3, 0.5, 0.7, 1.5] {
            let f = f_wyd(p);
            for dim in 2..=6 {
                for seed in 0..10u64 {
                    let rho = random_density(dim, 40 + seed);
                    let u = spectra::random_hermitian(dim, 80 + seed);
                    let b = TangentVector::new(i_commutator(rho.hermitian(), &u)).unwrap();
                    let g = metric_eval(&f, &rho, &b, &b).unwrap();
                    let bridge = wyd_info(p, &rho, &u) / (p * (1.0 - p));
                    assert!(
                        (g - bridge).abs() <= 1e-9 * (1.0 + g.abs()),
                        "bridge mismatch p={p} dim={dim}: {g} vs {bridge}"
                    );
                }
            }
        }
    }

    #[test]
    fn fisher_values() {
        let half = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let skew = SimplexPoint::new(vec![0.9, 0.1]).unwrap();
        let a = SimplexTangent::new(vec![1.0, -1.0]).unwrap();
        let zero = SimplexTangent::new(vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(fisher_info(&half, &a, &a), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fisher_info(&half, &a, &zero), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fisher_info(&skew, &a, &a), 100.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_embedding_matches_fisher() {
        let probs = [0.5, 0.3, 0.2];
        let av = [0.4, -0.1, -0.3];
        let bv = [-0.2, 0.5, -0.3];
        let rho = DensityMatrix::from_probabilities(&probs).unwrap();
        let diag = |v: &[f64]| {
            let n = v.len();
            let mut m = CMatrix::zeros(n, n);
            for (i, &x) in v.iter().enumerate() {
                m[(i, i)] = Complex64::new(x, 0.0);
            }
            TangentVector::new(HermitianMatrix::new(m).unwrap()).unwrap()
        };
        let a = diag(&av);
        let b = diag(&bv);
        let sp = SimplexPoint::new(probs.to_vec()).unwrap();
        let sa = SimplexTangent::new(av.to_vec()).unwrap();
        let sb = SimplexTangent::new(bv.to_vec()).unwrap();
        let classical = fisher_info(&sp, &sa, &sb);
        for f in catalog() {
            let quantum = metric_eval(&f, &rho, &a, &b).unwrap();
            assert!(
                (quantum - classical).abs() <= 1e-10 * (1.0 + classical.abs()),
                "{} diagonal restriction mismatch",
                f.name()
            );
        }
    }

    #[test]
    fn simplex_validation() {
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.0, 0.0]).is_err());
        assert!(SimplexTangent::new(vec![1.0, -0.5]).is_err());
    }
}
