//! Catalog of candidate operator monotone functions and their
//! Chentsov–Morotzova kernels `c_f(x, y) = 1/(y f(x/y))`.
//!
//! Each entry carries an evaluator, its derivative, and a `claimed_opmono`
//! flag. The flag is metadata recording the expected status; the [`verify`]
//! module owns the numerical truth.
//!
//! [`verify`]: crate::verify

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Taylor window around x = 1 for the Wigner–Yanase–Dyson family, where the
/// direct formula is a 0/0 ratio.
const NEAR_ONE: f64 = 1e-4;
/// Parameter window around p ∈ {0, 1} inside which `f_p` delegates to the
/// logarithmic endpoint form.
const P_ENDPOINT: f64 = 1e-6;
/// Relative diagonal threshold of [`cm_eval`].
pub const TAU_DIAG: f64 = 1e-9;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar C¹ function on (0, ∞): an evaluator plus its derivative.
#[derive(Clone)]
pub struct C1Fn {
    eval: ScalarFn,
    deriv: ScalarFn,
}

impl C1Fn {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }
}

impl fmt::Debug for C1Fn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("C1Fn")
    }
}

/// A named scalar function with derivative, parameters, and its expected
/// operator-monotonicity status.
#[derive(Clone, Debug)]
pub struct MonotoneFunction {
    name: String,
    f: C1Fn,
    params: Vec<(&'static str, f64)>,
    claimed_opmono: bool,
}

impl MonotoneFunction {
    pub fn new(name: impl Into<String>, f: C1Fn, claimed_opmono: bool) -> Self {
        Self {
            name: name.into(),
            f,
            params: Vec::new(),
            claimed_opmono,
        }
    }

    fn with_params(mut self, params: Vec<(&'static str, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    /// Expected status only; never assumed by the certification routines.
    pub fn claimed_opmono(&self) -> bool {
        self.claimed_opmono
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.f.eval(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.f.deriv(x)
    }

    pub fn func(&self) -> &C1Fn {
        &self.f
    }

    pub fn kernel(&self) -> CmKernel<'_> {
        CmKernel { source: self }
    }
}

/// The two-variable kernel `c_f(x, y) = 1/(y f(x/y))` of a monotone function.
#[derive(Clone, Copy, Debug)]
pub struct CmKernel<'a> {
    source: &'a MonotoneFunction,
}

impl CmKernel<'_> {
    pub fn source(&self) -> &MonotoneFunction {
        self.source
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        cm_eval(self.source, x, y)
    }
}

/// Kernel evaluation with the diagonal limit `c(x, x) = 1/x` taken over when
/// `|x - y| ≤ TAU_DIAG · max(x, y)`.
pub fn cm_eval(f: &MonotoneFunction, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::InvalidParameter {
            name: "cm_eval",
            message: format!("arguments must be positive (got {x}, {y})"),
        });
    }
    if (x - y).abs() <= TAU_DIAG * x.max(y) {
        return Ok(1.0 / x);
    }
    Ok(1.0 / (y * f.eval(x / y)))
}

/// `x^a - 1` without cancellation.
fn pow_m1(x: f64, a: f64) -> f64 {
    (a * x.ln()).exp_m1()
}

/// Coefficients of `(x^a - 1)/(a t)` as a polynomial in `t = x - 1`,
/// truncated after t⁴.
fn ratio_series(a: f64) -> [f64; 5] {
    let c1 = (a - 1.0) / 2.0;
    let c2 = c1 * (a - 2.0) / 3.0;
    let c3 = c2 * (a - 3.0) / 4.0;
    let c4 = c3 * (a - 4.0) / 5.0;
    [1.0, c1, c2, c3, c4]
}

fn poly_product(u: &[f64; 5], v: &[f64; 5]) -> [f64; 5] {
    let mut w = [0.0; 5];
    for i in 0..5 {
        for j in 0..(5 - i) {
            w[i + j] += u[i] * v[j];
        }
    }
    w
}

fn poly_eval(c: &[f64; 5], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

fn poly_deriv_eval(c: &[f64; 5], t: f64) -> f64 {
    (1..5).rev().fold(0.0, |acc, k| acc * t + k as f64 * c[k])
}

/// `f_p(x) = p(1-p)(x-1)² / ((x^p - 1)(x^{1-p} - 1))`, continued across the
/// removable singularity at x = 1. Near x = 1 the reciprocal is evaluated as a
/// Taylor polynomial in t = x - 1; elsewhere the factors use `exp_m1`.
struct WydForm {
    p: f64,
    /// series of ((x^p-1)(x^{1-p}-1)) / (p(1-p)(x-1)²) around x = 1
    w: [f64; 5],
}

impl WydForm {
    fn new(p: f64) -> Self {
        let w = poly_product(&ratio_series(p), &ratio_series(1.0 - p));
        Self { p, w }
    }

    fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let t = x - 1.0;
        if t.abs() < NEAR_ONE {
            1.0 / poly_eval(&self.w, t)
        } else {
            let p = self.p;
            p * (1.0 - p) * t * t / (pow_m1(x, p) * pow_m1(x, 1.0 - p))
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let t = x - 1.0;
        if t.abs() < NEAR_ONE {
            let w = poly_eval(&self.w, t);
            -poly_deriv_eval(&self.w, t) / (w * w)
        } else {
            let p = self.p;
            let f = self.eval(x);
            let log_deriv = 2.0 / t - p * x.powi(-1) * x.powf(p) / pow_m1(x, p)
                - (1.0 - p) * x.powi(-1) * x.powf(1.0 - p) / pow_m1(x, 1.0 - p);
            f * log_deriv
        }
    }
}

/// The logarithmic endpoint `f_0(x) = f_1(x) = (x - 1)/log x`.
struct BkmForm {
    /// series of log(1+t)/t
    w: [f64; 5],
}

impl BkmForm {
    fn new() -> Self {
        Self {
            w: [1.0, -0.5, 1.0 / 3.0, -0.25, 0.2],
        }
    }

    fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let t = x - 1.0;
        if t.abs() < NEAR_ONE {
            1.0 / poly_eval(&self.w, t)
        } else {
            t / x.ln()
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NAN;
        }
        let t = x - 1.0;
        if t.abs() < NEAR_ONE {
            let w = poly_eval(&self.w, t);
            -poly_deriv_eval(&self.w, t) / (w * w)
        } else {
            let l = x.ln();
            (l - t / x) / (l * l)
        }
    }
}

/// Wigner–Yanase–Dyson function `f_p`. Parameters within [`P_ENDPOINT`] of 0
/// or 1 delegate to the logarithmic endpoint form.
pub fn f_wyd(p: f64) -> MonotoneFunction {
    let name = format!("wyd:p={p}");
    let claimed = (-1.0..=2.0).contains(&p);
    let f = if p.abs() <= P_ENDPOINT || (1.0 - p).abs() <= P_ENDPOINT {
        let form = BkmForm::new();
        let form2 = BkmForm::new();
        C1Fn::new(move |x| form.eval(x), move |x| form2.deriv(x))
    } else {
        let form = WydForm::new(p);
        let form2 = WydForm::new(p);
        C1Fn::new(move |x| form.eval(x), move |x| form2.deriv(x))
    };
    MonotoneFunction::new(name, f, claimed).with_params(vec![("p", p)])
}

/// `f_Bures(x) = (1 + x)/2`, the SLD-metric function.
pub fn bures() -> MonotoneFunction {
    MonotoneFunction::new(
        "bures",
        C1Fn::new(|x| 0.5 * (1.0 + x), |_| 0.5),
        true,
    )
}

/// `f_0(x) = (x - 1)/log x`, the BKM-metric function.
pub fn bkm() -> MonotoneFunction {
    let form = BkmForm::new();
    let form2 = BkmForm::new();
    MonotoneFunction::new(
        "bkm",
        C1Fn::new(move |x| form.eval(x), move |x| form2.deriv(x)),
        true,
    )
}

/// `f_{1/2}(x) = (1 + √x)²/4`, the Wigner–Yanase function.
pub fn wy() -> MonotoneFunction {
    MonotoneFunction::new(
        "wy",
        C1Fn::new(
            |x| {
                let s = 1.0 + x.sqrt();
                0.25 * s * s
            },
            |x| {
                let s = x.sqrt();
                (1.0 + s) / (4.0 * s)
            },
        ),
        true,
    )
}

/// `f_{-1}(x) = 2x/(1 + x)`, the RLD-metric function.
pub fn rld() -> MonotoneFunction {
    MonotoneFunction::new(
        "rld",
        C1Fn::new(
            |x| 2.0 * x / (1.0 + x),
            |x| {
                let s = 1.0 + x;
                2.0 / (s * s)
            },
        ),
        true,
    )
    .with_params(vec![("p", -1.0)])
}

/// Interpolating power family `((1 + x^{1/ν})/2)^ν`.
pub fn power(nu: f64) -> Result<MonotoneFunction> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "nu",
            message: format!("power family needs nu > 0 (got {nu})"),
        });
    }
    let name = format!("power:nu={nu}");
    let claimed = (1.0..=2.0).contains(&nu);
    let f = C1Fn::new(
        move |x: f64| (0.5 * (1.0 + x.powf(1.0 / nu))).powf(nu),
        move |x: f64| {
            let u = x.powf(1.0 / nu);
            (0.5 * (1.0 + u)).powf(nu - 1.0) * 0.5 * u / x
        },
    );
    Ok(MonotoneFunction::new(name, f, claimed).with_params(vec![("nu", nu)]))
}

/// `f(x) = x`: operator monotone but not symmetric. Test material.
pub fn identity() -> MonotoneFunction {
    MonotoneFunction::new("identity", C1Fn::new(|x| x, |_| 1.0), true)
}

/// `f(x) = x²`: the standard non-monotone control.
pub fn square() -> MonotoneFunction {
    MonotoneFunction::new("square", C1Fn::new(|x| x * x, |x| 2.0 * x), false)
}

/// The standard catalog: named metrics, the f_p grid on [-1, 2], and the
/// interpolating power family.
pub fn catalog() -> Vec<MonotoneFunction> {
    let mut out = vec![bures(), bkm(), wy(), rld()];
    for i in 0..=12 {
        out.push(f_wyd(-1.0 + 0.25 * i as f64));
    }
    for nu in [1.0, 1.25, 1.5, 1.75, 2.0] {
        out.push(power(nu).unwrap());
    }
    out
}

/// Ando transform `x ↦ f(x^{1/ν})^ν`. Requires ν ≥ 1, where the transform
/// preserves operator monotonicity.
pub fn ando_transform(f: &MonotoneFunction, nu: f64) -> Result<MonotoneFunction> {
    if !(nu >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "nu",
            message: format!("ando transform needs nu >= 1 (got {nu})"),
        });
    }
    let name = format!("ando:nu={nu}({})", f.name());
    let claimed = f.claimed_opmono();
    let inner = f.func().clone();
    let inner2 = f.func().clone();
    let g = C1Fn::new(
        move |x: f64| inner.eval(x.powf(1.0 / nu)).powf(nu),
        move |x: f64| {
            let u = x.powf(1.0 / nu);
            inner2.eval(u).powf(nu - 1.0) * inner2.deriv(u) * u / x
        },
    );
    Ok(MonotoneFunction::new(name, g, claimed))
}

/// Result of the normalization/symmetry screen.
#[derive(Clone, Debug, serde::Serialize)]
pub struct NormSymReport {
    /// max over the grid of |f(x) - x f(1/x)|
    pub max_symmetry_residual: f64,
    /// |f(1) - 1|
    pub normalization_residual: f64,
    pub pass: bool,
}

/// Checks `f(x) = x f(1/x)` over the grid and `f(1) = 1`, both to 1e-9.
pub fn check_normalized_symmetric(f: &MonotoneFunction, grid: &[f64]) -> NormSymReport {
    let mut sym = 0.0f64;
    for &x in grid {
        if x > 0.0 {
            sym = sym.max((f.eval(x) - x * f.eval(1.0 / x)).abs());
        }
    }
    let norm = (f.eval(1.0) - 1.0).abs();
    NormSymReport {
        max_symmetry_residual: sym,
        normalization_residual: norm,
        pass: sym <= 1e-9 && norm <= 1e-9,
    }
}

/// Geometric grid of `n` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let step = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| lo * step.powi(k as i32)).collect()
}

/// Parses `name[:key=value[,key=value]]` into its parts.
pub(crate) fn split_spec(spec: &str) -> Result<(&str, Vec<(String, f64)>)> {
    let mut parts = spec.splitn(2, ':');
    let name = parts.next().unwrap_or_default();
    let mut params = Vec::new();
    if let Some(rest) = parts.next() {
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::Parse(format!("expected key=value in spec '{spec}', got '{kv}'"))
            })?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad numeric value '{v}' in spec '{spec}'")))?;
            params.push((k.trim().to_string(), v));
        }
    }
    Ok((name.trim(), params))
}

fn require_param(params: &[(String, f64)], key: &str, spec: &str) -> Result<f64> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::Parse(format!("spec '{spec}' needs parameter {key}=<value>")))
}

/// Catalog lookup by string spec: `bures`, `sld`, `bkm`, `wy`, `rld`,
/// `wyd:p=0.5`, `power:nu=1.5`, plus the test functions `identity`, `square`.
pub fn lookup(spec: &str) -> Result<MonotoneFunction> {
    let (name, params) = split_spec(spec)?;
    match name {
        "bures" | "sld" => Ok(bures()),
        "bkm" => Ok(bkm()),
        "wy" => Ok(wy()),
        "rld" => Ok(rld()),
        "wyd" => Ok(f_wyd(require_param(&params, "p", spec)?)),
        "power" => power(require_param(&params, "nu", spec)?),
        "identity" | "x" => Ok(identity()),
        "square" | "x2" => Ok(square()),
        _ => Err(Error::UnknownSpec(spec.to_string())),
    }
}
