//! # monometric
//!
//! A numerical toolkit for monotone (quantum Fisher) metrics on the manifold
//! of strictly positive density matrices, and for the paired metrics induced
//! by embedding pairs (φ, χ).
//!
//! The library is organised around five concerns:
//!
//! - [`spectra`]: Hermitian eigendecomposition, functional calculus,
//!   Hilbert–Schmidt geometry, and the tangent split `A = A^c + i[ρ, U]`.
//! - [`cm_kernel`]: a catalog of candidate operator monotone functions
//!   (Wigner–Yanase–Dyson family, Bures/SLD, BKM, RLD, interpolating power
//!   family) and the two-variable kernels `c_f(x, y) = 1/(y f(x/y))` they
//!   generate.
//! - [`metrics`]: metric evaluation `g(A, B) = Tr(A · c_f(L_ρ, R_ρ)(B))` in
//!   the eigenbasis of ρ, the Wigner–Yanase–Dyson information, and the
//!   classical Fisher information on the probability simplex.
//! - [`pullback`]: embedding pairs, the Daleckii–Krein derivative of a matrix
//!   function along a tangent direction, paired metrics
//!   `Tr(D_ρφ(A) · D_ρχ(B))`, and the N^q duality map on the Amari sphere.
//! - [`verify`]: numerical certification and falsification — Loewner-matrix
//!   positivity sampling, random operator-order searches, CPTP contraction
//!   trials, embedding-pair characterization, and regular-variation index
//!   estimation.
//!
//! Everything is deterministic under a fixed seed; random ensembles use
//! counter-mode ChaCha streams so trial-level parallelism does not change
//! results.

pub mod cm_kernel;
pub mod error;
pub mod jsonio;
pub mod metrics;
pub mod pullback;
pub mod spectra;
pub mod tablefn;
pub mod verify;

pub use error::{Error, Result};
pub use spectra::{DensityMatrix, HermitianMatrix, TangentVector};
