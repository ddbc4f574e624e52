//! Numerical certification and falsification: operator monotonicity via
//! Loewner-matrix sampling and random operator-order searches, channel
//! contraction trials, embedding-pair characterization, and
//! regular-variation index estimation.
//!
//! Verdicts are tri-state. A violation beyond the PSD tolerance but below the
//! witness floor (1e-4) lands in the gray zone and is reported as
//! `Inconclusive` rather than `Fail`; genuine failures carry a witness that
//! can be re-verified from scratch.

mod channel;
mod characterize;
pub mod corpus;
mod monotonicity;
mod rv;

pub use channel::{
    apply_channel, contraction_test, merge_check, merge_map, random_cptp, recheck_contraction,
    ContractionWitness, MergeCheck, QuantumChannel, StochasticMap,
};
pub use characterize::{
    characterize_pair, characterize_pair_with, normalize_pair, CharacterizeOptions,
    CharacterizeReport, CheckResult,
};
pub use monotonicity::{
    loewner_matrix, loewner_test, opmono_matrix_search, power_family_scan, recheck_loewner,
    recheck_matrix_pair, PowerScanRow,
};
pub use rv::{default_t_grid, default_x_sequence, lookup_h, rv_index, RVEstimate, RVSample, Side};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::jsonio::MatrixJson;

/// Relative PSD tolerance: eigenvalues above `-PSD_TOL · max(1, ‖M‖)` count
/// as nonnegative.
pub const PSD_TOL: f64 = 1e-9;
/// Minimum absolute violation for a `Fail` verdict; smaller violations are
/// reported as `Inconclusive`.
pub const WITNESS_FLOOR: f64 = 1e-4;

/// Independent per-trial generator: one master seed, one counter stream per
/// trial, so parallel scheduling cannot change results.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Pass,
    Fail,
    /// Beyond float tolerance but below the witness floor: enlarge sampling.
    Inconclusive,
}

/// Re-checkable evidence for a non-pass verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A sampled point set whose Loewner matrix has a negative eigenvalue.
    LoewnerSet {
        points: Vec<f64>,
        min_eigenvalue: f64,
        violation: f64,
    },
    /// Matrices 0 ≤ A ≤ B with f(B) - f(A) not PSD.
    MatrixPair {
        a: MatrixJson,
        b: MatrixJson,
        min_eigenvalue: f64,
        violation: f64,
    },
    /// A channel/state/direction triple with g_after > g_before.
    Contraction(ContractionWitness),
}

/// Outcome of a monotonicity or contraction sampling run.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityVerdict {
    pub test: &'static str,
    pub function: String,
    pub status: VerdictStatus,
    pub trials: usize,
    /// Relative PSD tolerance in force.
    pub tolerance: f64,
    /// Most negative margin observed (min eigenvalue, or contraction excess
    /// with flipped sign).
    pub min_observed: f64,
    /// Trials that exceeded the tolerance.
    pub violations: usize,
    /// Inputs resampled because a positivity precondition failed.
    pub resamples: usize,
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl MonotonicityVerdict {
    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }
}
