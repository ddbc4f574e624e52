//! Regression corpus for the pair-characterization pipeline: families that
//! must fail, each with the check expected to flag them. The entries are the
//! artifact's own falsification battery — perturbed power pairs, mixed
//! exponents, scalar mismatches, and out-of-range power pairs.

use crate::cm_kernel::C1Fn;
use crate::error::{Error, Result};
use crate::pullback::{wyd_pair, EmbeddingPair};

pub struct CorpusEntry {
    pub name: String,
    pub pair: EmbeddingPair,
    /// The pipeline check expected to flag this entry.
    pub expect_fail_check: &'static str,
}

/// Adaptive Simpson quadrature, used to build the homogeneity-breaking pair
/// whose derivative identity still holds exactly.
fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a), g(m), g(b));
    simpson_step(g, a, b, fa, fm, fb, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (g(lm), g(rm));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let split = left + right;
    if depth == 0 || (split - whole).abs() <= 15.0 * tol {
        split + (split - whole) / 15.0
    } else {
        simpson_step(g, a, m, fa, flm, fm, tol / 2.0, depth - 1)
            + simpson_step(g, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }
}

fn integrate_from_one(g: impl Fn(f64) -> f64 + Copy, x: f64) -> f64 {
    if (x - 1.0).abs() < 1e-14 {
        return 0.0;
    }
    if x > 1.0 {
        simpson(&g, 1.0, x, 1e-12, 40)
    } else {
        -simpson(&g, x, 1.0, 1e-12, 40)
    }
}

/// φ perturbed by ε·x², χ left at the power form.
fn phi_perturbed(p: f64, eps: f64) -> CorpusEntry {
    let base = wyd_pair(p);
    let phi = C1Fn::new(
        move |x: f64| x.powf(p) / p + eps * x * x,
        move |x: f64| x.powf(p - 1.0) + 2.0 * eps * x,
    );
    CorpusEntry {
        name: format!("phi-sq:p={p},eps={eps}"),
        pair: EmbeddingPair::new(
            format!("phi-sq:p={p},eps={eps}"),
            phi,
            base.chi().clone(),
        ),
        expect_fail_check: "homogeneity",
    }
}

/// χ perturbed by ε·x³.
fn chi_perturbed(p: f64, eps: f64) -> CorpusEntry {
    let base = wyd_pair(p);
    let q = 1.0 - p;
    let chi = C1Fn::new(
        move |x: f64| x.powf(q) / q + eps * x * x * x,
        move |x: f64| x.powf(-p) + 3.0 * eps * x * x,
    );
    CorpusEntry {
        name: format!("chi-cube:p={p},eps={eps}"),
        pair: EmbeddingPair::new(
            format!("chi-cube:p={p},eps={eps}"),
            base.phi().clone(),
            chi,
        ),
        expect_fail_check: "homogeneity",
    }
}

/// φ from one power family member, χ from another.
fn mixed(p: f64, q: f64) -> CorpusEntry {
    CorpusEntry {
        name: format!("mixed:p={p},q={q}"),
        pair: EmbeddingPair::new(
            format!("mixed:p={p},q={q}"),
            wyd_pair(p).phi().clone(),
            wyd_pair(q).chi().clone(),
        ),
        expect_fail_check: "homogeneity",
    }
}

pub fn falsification_corpus() -> Vec<CorpusEntry> {
    let mut entries = Vec::new();
    for p in [0.5, 0.3] {
        for eps in [1e-2, 1e-1] {
            entries.push(phi_perturbed(p, eps));
        }
    }
    for p in [0.7, 1.5] {
        for eps in [1e-2, 1e-1] {
            entries.push(chi_perturbed(p, eps));
        }
    }
    entries.push(mixed(0.5, 0.3));
    entries.push(mixed(1.5, 0.25));

    // scalar mismatch: induces twice the valid metric, caught at x = 1
    entries.push(CorpusEntry {
        name: "scaled-log".into(),
        pair: EmbeddingPair::new(
            "scaled-log",
            C1Fn::new(|x| x, |_| 1.0),
            C1Fn::new(|x: f64| 2.0 * x.ln(), |x| 2.0 / x),
        ),
        expect_fail_check: "slope-normalization",
    });

    // affine pair with constant kernel
    entries.push(CorpusEntry {
        name: "affine".into(),
        pair: EmbeddingPair::new(
            "affine",
            C1Fn::new(|x| 3.0 * x + 5.0, |_| 3.0),
            C1Fn::new(|x| x / 3.0, |_| 1.0 / 3.0),
        ),
        expect_fail_check: "homogeneity",
    });

    // power pairs outside the admissible parameter range: the kernel is fine
    // but the recovered function is not operator monotone
    for p in [3.0, -2.0, 2.5, -1.5] {
        entries.push(CorpusEntry {
            name: format!("wyd-pair:p={p}"),
            pair: wyd_pair(p),
            expect_fail_check: "recovered-function",
        });
    }

    // φ = 2√x + 0.1x² with χ integrated from χ' = 1/(xφ'): the derivative
    // identity holds pointwise, only homogeneity breaks
    let phi_deriv = |x: f64| 1.0 / x.sqrt() + 0.2 * x;
    let chi_deriv = move |x: f64| 1.0 / (x * phi_deriv(x));
    entries.push(CorpusEntry {
        name: "balanced-sqrt-sq".into(),
        pair: EmbeddingPair::new(
            "balanced-sqrt-sq",
            C1Fn::new(
                |x: f64| 2.0 * x.sqrt() + 0.1 * x * x,
                |x: f64| 1.0 / x.sqrt() + 0.2 * x,
            ),
            C1Fn::new(move |x: f64| integrate_from_one(chi_deriv, x), chi_deriv),
        ),
        expect_fail_check: "homogeneity",
    });

    entries
}

/// Lookup for `corpus:<name>` pair specs.
pub fn lookup_corpus(name: &str) -> Result<EmbeddingPair> {
    falsification_corpus()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.pair)
        .ok_or_else(|| Error::UnknownSpec(format!("corpus:{name}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn corpus_is_large_enough() {
        assert!(falsification_corpus().len() >= 12);
    }

    #[test]
    fn quadrature_chi_matches_its_derivative() {
        let entry = falsification_corpus()
            .into_iter()
            .find(|e| e.name == "balanced-sqrt-sq")
            .unwrap();
        let chi = entry.pair.chi();
        for &x in &[0.01f64, 0.4, 1.0, 3.0, 250.0] {
            let h = 1e-5 * x.max(1e-3);
            let fd = (chi.eval(x + h) - chi.eval(x - h)) / (2.0 * h);
            assert!(
                (fd - chi.deriv(x)).abs() <= 1e-6 * (1.0 + chi.deriv(x).abs()),
                "quadrature inconsistent at {x}"
            );
        }
        // derivative identity of the construction
        let phi = entry.pair.phi();
        for &x in &[0.05, 1.0, 20.0] {
            assert_abs_diff_eq!(phi.deriv(x) * chi.deriv(x), 1.0 / x, epsilon = 1e-10 / x);
        }
    }

    #[test]
    fn lookup_finds_entries() {
        assert!(lookup_corpus("scaled-log").is_ok());
        assert!(lookup_corpus("mixed:p=0.5,q=0.3").is_ok());
        assert!(lookup_corpus("missing").is_err());
    }
}
