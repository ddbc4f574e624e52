//! Hermitian linear-algebra core: eigendecomposition, functional calculus,
//! Hilbert–Schmidt geometry, and the tangent-space decomposition of the
//! density-matrix manifold.
//!
//! All matrix types validate their defining invariants at construction and are
//! immutable afterwards, so they can be shared freely across worker threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Strict-positivity floor for density matrices. Inputs below it are rejected,
/// not projected: the manifold is the strictly positive cone.
pub const EPS_FLOOR: f64 = 1e-12;
/// Maximum allowed asymmetry |H_ij - conj(H_ji)| at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices and tangent vectors.
pub const TRACE_TOL: f64 = 1e-10;
/// Relative eigenvalue-gap threshold below which two eigenvalues are treated
/// as degenerate when splitting a tangent vector.
pub const DEGENERACY_REL: f64 = 1e-8;

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A complex square matrix with `H = H*` enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

impl HermitianMatrix {
    /// Validates squareness and Hermiticity (within [`HERMITICITY_TOL`]).
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.is_empty() {
            return Err(Error::InvalidParameter {
                name: "dim",
                message: "matrix must be at least 1x1".into(),
            });
        }
        let mut asym: f64 = 0.0;
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                asym = asym.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITICITY_TOL || !mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self { mat })
    }

    /// Wraps `(M + M*)/2`. Used internally after rotations, where round-off
    /// introduces asymmetry of order machine epsilon.
    pub(crate) fn symmetrized(mat: CMatrix) -> Self {
        Self {
            mat: hermitize(&mat),
        }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, -1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        Self { mat: m }
    }

    pub fn pauli_z() -> Self {
        Self::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Real trace (the imaginary part vanishes for Hermitian matrices).
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }
}

/// Spectral decomposition `H = V diag(λ) V*` with eigenvalues sorted
/// descending and deterministically tie-broken.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(λ) V*`, for reconstruction checks.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let diag = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(self.values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * diag * self.vectors.adjoint()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest |λ|, i.e. the spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &l| m.max(l.abs()))
    }
}

/// Fixes the overall phase of each eigenvector: the largest-modulus entry is
/// made real and nonnegative, so repeated runs emit identical spectral data.
fn canonicalize_column(col: &mut nalgebra::DVectorViewMut<C64>) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in col.iter().enumerate() {
        let n = z.norm();
        if n > best_norm + 1e-14 {
            best_norm = n;
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = col[best] / C64::new(best_norm, 0.0);
        let rotation = phase.conj();
        for z in col.iter_mut() {
            *z *= rotation;
        }
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Each rotation zeroes
/// one off-diagonal pair through a phase factor and a real Givens rotation;
/// sweeps repeat until the off-diagonal mass reaches the floating floor.
///
/// Jacobi converges unconditionally and keeps high relative accuracy across
/// wide spectra, which tridiagonalization-based solvers do not guarantee.
fn jacobi_hermitian(input: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = input.nrows();
    let mut a = input.clone();
    let mut v = CMatrix::identity(n, n);
    let scale = input.norm().max(f64::MIN_POSITIVE);
    let thresh = n as f64 * f64::EPSILON * scale;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= thresh {
            let values = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs <= 1e-300 {
                    continue;
                }
                // phase that makes the pivot real, then a real Jacobi angle
                let phase = apq / C64::new(abs, 0.0);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * abs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U[p,p]=c, U[p,q]=s, U[q,p]=-s·conj(phase), U[q,q]=c·conj(phase)
                let upq = C64::new(s, 0.0);
                let uqp = phase.conj() * (-s);
                let uqq = phase.conj() * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * uqp;
                    a[(i, q)] = aip * upq + aiq * uqq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * uqp.conj();
                    a[(q, j)] = apj * upq.conj() + aqj * uqq.conj();
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * uqp;
                    v[(i, q)] = vip * upq + viq * uqq;
                }
                // enforce exact Hermiticity of the rotated pivot
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    Err(Error::EigenFailed)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned descending; exact ties are broken by comparing the
/// phase-canonicalized eigenvectors lexicographically, so the output is a
/// deterministic function of the input bits.
pub fn eigh(h: &HermitianMatrix) -> Result<Eigh> {
    let (raw_values, mut vectors) = jacobi_hermitian(&h.mat)?;
    let n = h.dim();
    for j in 0..n {
        canonicalize_column(&mut vectors.column_mut(j));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let la = raw_values[a];
        let lb = raw_values[b];
        lb.partial_cmp(&la)
            .unwrap()
            .then_with(|| column_lex(&vectors, b).partial_cmp(&column_lex(&vectors, a)).unwrap())
    });
    let values: Vec<f64> = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

/// Eigenvalues of a real symmetric matrix, via the Hermitian path.
pub fn eigvals_symmetric(m: &nalgebra::DMatrix<f64>) -> Result<Vec<f64>> {
    let c = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        C64::new(0.5 * (m[(i, j)] + m[(j, i)]), 0.0)
    });
    Ok(jacobi_hermitian(&c)?.0)
}

fn column_lex(m: &CMatrix, j: usize) -> Vec<f64> {
    m.column(j).iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Functional calculus: `f(H) = V diag(f(λ)) V*`.
///
/// Errors if `f` produces a non-finite value at some eigenvalue.
pub fn mat_fn(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    mat_fn_with(&eigh(h)?, f)
}

/// Same as [`mat_fn`] with a precomputed decomposition.
pub fn mat_fn_with(e: &Eigh, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let n = e.dim();
    let mut fl = Vec::with_capacity(n);
    for &l in &e.values {
        let y = f(l);
        if !y.is_finite() {
            return Err(Error::Domain {
                name: "mat_fn".into(),
                x: l,
                value: y,
            });
        }
        fl.push(y);
    }
    let scaled = CMatrix::from_fn(n, n, |i, j| e.vectors[(i, j)] * C64::new(fl[j], 0.0));
    Ok(HermitianMatrix::symmetrized(scaled * e.vectors.adjoint()))
}

/// Hilbert–Schmidt inner product `Tr(A* B)`, real for Hermitian arguments.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            acc += a.mat[(i, j)].conj() * b.mat[(i, j)];
        }
    }
    Ok(acc.re)
}

/// A strictly positive, unit-trace Hermitian matrix with cached spectral data.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    base: HermitianMatrix,
    spectrum: Eigh,
}

impl DensityMatrix {
    /// Validates unit trace (within [`TRACE_TOL`]) and strict positivity
    /// (eigenvalues at least [`EPS_FLOOR`]).
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let tr = base.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace {
                expected: 1.0,
                got: tr,
            });
        }
        let spectrum = eigh(&base)?;
        let min = spectrum.min_eigenvalue();
        if min < EPS_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { base, spectrum })
    }

    /// Diagonal density matrix from strictly positive probabilities.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let n = p.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &x) in p.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self::new(HermitianMatrix::new(m)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_probabilities(&vec![1.0 / dim as f64; dim]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    /// Cached spectral decomposition.
    pub fn spectrum(&self) -> &Eigh {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// `f(ρ)` using the cached decomposition.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        mat_fn_with(&self.spectrum, f)
    }
}

/// A traceless Hermitian matrix: a tangent vector to the density manifold.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: HermitianMatrix,
}

impl TangentVector {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let tr = base.trace();
        if tr.abs() > TRACE_TOL {
            return Err(Error::BadTrace {
                expected: 0.0,
                got: tr,
            });
        }
        Ok(Self { base })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.base
    }
}

/// The split `A = A^c + i[ρ, U]` of a tangent vector into its commuting part
/// and its orthogonal complement, together with the generator `U`.
#[derive(Debug, Clone)]
pub struct TangentSplit {
    /// Part commuting with ρ (block-diagonal across eigenvalue clusters).
    pub commuting: HermitianMatrix,
    /// Orthogonal part, equal to `i[ρ, U]`.
    pub orthogonal: HermitianMatrix,
    /// Self-adjoint generator of the orthogonal part; zero within clusters.
    pub generator: HermitianMatrix,
}

/// Splits `A` in the eigenbasis of ρ. Entries joining eigenvalues closer than
/// `DEGENERACY_REL · ‖ρ‖` are routed to the commuting part, which keeps the
/// generator `U = A^o_ij / (i(λ_i - λ_j))` away from division blow-up.
pub fn decompose_tangent(rho: &DensityMatrix, a: &TangentVector) -> Result<TangentSplit> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: a.dim(),
        });
    }
    let e = rho.spectrum();
    let n = e.dim();
    let v = &e.vectors;
    let a_tilde = v.adjoint() * a.matrix() * v;
    let tau = DEGENERACY_REL * e.spectral_norm();
    let mut comm = CMatrix::zeros(n, n);
    let mut orth = CMatrix::zeros(n, n);
    let mut gen = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let gap = e.values[i] - e.values[j];
            if gap.abs() <= tau {
                comm[(i, j)] = a_tilde[(i, j)];
            } else {
                orth[(i, j)] = a_tilde[(i, j)];
                // division by i·gap == multiplication by -i/gap
                gen[(i, j)] = a_tilde[(i, j)] * C64::new(0.0, -1.0 / gap);
            }
        }
    }
    let back = |m: CMatrix| HermitianMatrix::symmetrized(v * m * v.adjoint());
    Ok(TangentSplit {
        commuting: back(comm),
        orthogonal: back(orth),
        generator: back(gen),
    })
}

/// `i[X, Y]`, Hermitian for Hermitian inputs.
pub fn i_commutator(x: &HermitianMatrix, y: &HermitianMatrix) -> HermitianMatrix {
    let c = x.matrix() * y.matrix() - y.matrix() * x.matrix();
    HermitianMatrix::symmetrized(c.map(|z| z * C64::new(0.0, 1.0)))
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

fn gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng))
}

/// `(G + G*)/2` with independent standard complex Gaussian entries.
/// Deterministic for a fixed seed.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hermitian_rng(dim, &mut rng)
}

pub(crate) fn random_hermitian_rng(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = gaussian_matrix(dim, rng);
    HermitianMatrix::symmetrized(g)
}

/// `W W* / Tr(W W*)` with Gaussian `W`, resampled in the (measure-zero) event
/// that an eigenvalue drops below [`EPS_FLOOR`].
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_rng(dim, &mut rng)
}

pub(crate) fn random_density_rng(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    loop {
        let w = gaussian_matrix(dim, rng);
        let ww = &w * w.adjoint();
        let tr = ww.trace().re;
        let candidate = HermitianMatrix::symmetrized(ww.scale(1.0 / tr));
        if let Ok(d) = DensityMatrix::new(candidate) {
            return d;
        }
    }
}

/// Random traceless Hermitian matrix (deterministic for a fixed seed).
pub fn random_tangent(dim: usize, seed: u64) -> TangentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tangent_rng(dim, &mut rng)
}

pub(crate) fn random_tangent_rng(dim: usize, rng: &mut ChaCha8Rng) -> TangentVector {
    let h = random_hermitian_rng(dim, rng);
    let shift = h.trace() / dim as f64;
    let m = h.matrix() - CMatrix::identity(dim, dim).scale(shift);
    TangentVector::new(HermitianMatrix::symmetrized(m)).unwrap()
}
