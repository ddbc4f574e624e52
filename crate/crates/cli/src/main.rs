//! Command-line front end: parses inputs, dispatches to the library, and
//! emits machine-readable reports.
//!
//! Reports go to stdout as JSON; diagnostics go to stderr. Exit codes:
//! 0 = pass/success, 1 = fail verdict, 2 = usage or validation error.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use monometric::cm_kernel::{self, MonotoneFunction};
use monometric::error::{Error, Result};
use monometric::jsonio;
use monometric::metrics::{fisher_info, metric_eval, wyd_info, SimplexPoint, SimplexTangent};
use monometric::pullback::{self, pairing_report, EmbeddingPair};
use monometric::tablefn;
use monometric::verify::{
    characterize_pair_with, contraction_test, loewner_test, opmono_matrix_search, rv_index,
    CharacterizeOptions, Side, Witness,
};

#[derive(Parser)]
#[command(
    name = "monometric",
    version,
    about = "Monotone quantum metrics: evaluation, pairing, and certification"
)]
struct Cli {
    /// RNG seed (default: MONOMETRIC_SEED environment variable, else 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Omit the timing field so reports are byte-stable
    #[arg(long, global = true)]
    no_timing: bool,
    /// Worker threads for trial-level parallelism (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monotone metric evaluation
    Metric {
        #[command(subcommand)]
        action: MetricCmd,
    },
    /// Wigner-Yanase-Dyson information I_p(rho, A)
    Wyd(WydArgs),
    /// Classical Fisher information on the probability simplex
    Fisher(FisherArgs),
    /// Kernel-vs-pair consistency checks
    Pairing {
        #[command(subcommand)]
        action: PairingCmd,
    },
    /// Operator-monotonicity certification
    Opmono {
        #[command(subcommand)]
        action: OpmonoCmd,
    },
    /// CPTP channel tests
    Channel {
        #[command(subcommand)]
        action: ChannelCmd,
    },
    /// Run the characterization pipeline on an embedding pair
    Characterize(CharacterizeArgs),
    /// Estimate the regular-variation index of a scalar function
    RvIndex(RvArgs),
    /// Sample a kernel surface c_f(x, y) into a CSV file
    KernelSurface(SurfaceArgs),
}

#[derive(Subcommand)]
enum MetricCmd {
    /// Evaluate g_f(rho; A, B) for a catalog function
    Eval(MetricEvalArgs),
}

#[derive(Args, Serialize)]
struct MetricEvalArgs {
    /// Function spec, e.g. wyd:p=0.5, bures, bkm, rld, power:nu=1.5
    #[arg(long)]
    f: String,
    /// Density matrix (JSON file or inline {"dim":..,"rows":..})
    #[arg(long)]
    rho: String,
    /// Tangent direction A
    #[arg(long)]
    a: String,
    /// Tangent direction B (defaults to A)
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args, Serialize)]
struct WydArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rho: String,
    /// Self-adjoint observable A (Hermitian, any trace)
    #[arg(long)]
    a: String,
}

#[derive(Args, Serialize)]
struct FisherArgs {
    /// Probability vector, inline like "[0.5,0.5]" or a file path
    #[arg(long)]
    rho: String,
    /// Zero-sum tangent, inline like "[1,-1]" or a file path
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Subcommand)]
enum PairingCmd {
    /// Scalar + matrix residuals between c_f and the pair kernel
    Check(PairingArgs),
}

#[derive(Args, Serialize)]
struct PairingArgs {
    #[arg(long)]
    f: String,
    /// Pair spec: p=0.5, wyd:p=0.5, log, corpus:<name>, table:<file>
    #[arg(long)]
    pair: String,
    /// Dimension range for the matrix cross-check, e.g. 2..6
    #[arg(long, default_value = "2..6")]
    dims: String,
    /// Random trials per dimension
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

#[derive(Subcommand)]
enum OpmonoCmd {
    /// Loewner sampling plus random order search
    Test(OpmonoArgs),
}

#[derive(Args, Serialize)]
struct OpmonoArgs {
    #[arg(long)]
    f: String,
    /// Points per Loewner set
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// Number of Loewner sets
    #[arg(long, default_value_t = 200)]
    sets: usize,
    /// Dimension range for the matrix search, e.g. 2..4
    #[arg(long, default_value = "2..4")]
    dims: String,
    /// Matrix-search trials
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Dump the failure witness (if any) as CSV
    #[arg(long)]
    witness_csv: Option<String>,
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Random CPTP contraction trials
    Contract(ChannelArgs),
}

#[derive(Args, Serialize)]
struct ChannelArgs {
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value = "2..4")]
    dims: String,
    #[arg(long)]
    witness_csv: Option<String>,
}

#[derive(Args, Serialize)]
struct CharacterizeArgs {
    /// Pair spec: p=0.5, wyd:p=0.5, log, corpus:<name>, table:<file>
    #[arg(long)]
    pair: String,
    #[arg(long, default_value_t = 1e-9)]
    symmetry_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    homogeneity_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    slope_tol: f64,
    /// Points per Loewner set for the recovered function
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 200)]
    sets: usize,
}

#[derive(Args, Serialize)]
struct RvArgs {
    /// Function spec: pow:p=.., powlog:p=.., loginv, pair-product:p=..,
    /// table:<file>
    #[arg(long)]
    h: String,
    /// Limit point: zero or infinity
    #[arg(long, default_value = "zero")]
    side: String,
    /// Comma-separated multipliers, e.g. 2,5,10
    #[arg(long)]
    t: Option<String>,
    /// Length of the geometric x-sequence
    #[arg(long)]
    terms: Option<usize>,
    /// Ratio of the geometric x-sequence
    #[arg(long)]
    ratio: Option<f64>,
    /// First element of the x-sequence
    #[arg(long)]
    x0: Option<f64>,
}

#[derive(Args, Serialize)]
struct SurfaceArgs {
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 1.0)]
    x_min: f64,
    #[arg(long, default_value_t = 3.0)]
    x_max: f64,
    #[arg(long, default_value_t = 3)]
    x_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    y_min: f64,
    #[arg(long, default_value_t = 3.0)]
    y_max: f64,
    #[arg(long, default_value_t = 3)]
    y_steps: usize,
    /// Space the grid geometrically instead of linearly
    #[arg(long)]
    log: bool,
    /// Output CSV path
    #[arg(long)]
    out: String,
}

/// Everything a finished command hands back to `main` for assembly.
struct Outcome {
    command: &'static str,
    config: Value,
    results: Value,
    pass: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a Value,
    seed: u64,
    results: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
    version: &'a str,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("MONOMETRIC_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    let started = Instant::now();
    match run(&cli.command, seed) {
        Ok(outcome) => {
            let timing_ms = (!cli.no_timing).then(|| started.elapsed().as_secs_f64() * 1e3);
            let report = Report {
                command: outcome.command,
                config: &outcome.config,
                seed,
                results: &outcome.results,
                timing_ms,
                version: env!("CARGO_PKG_VERSION"),
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report"));
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Inline JSON (starts with the given bracket) or the content of a file.
fn inline_or_file(arg: &str, bracket: char) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with(bracket) {
        Ok(trimmed.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn load_density(arg: &str) -> Result<monometric::DensityMatrix> {
    jsonio::parse_density(&inline_or_file(arg, '{')?)
}

fn load_tangent(arg: &str) -> Result<monometric::TangentVector> {
    jsonio::parse_tangent(&inline_or_file(arg, '{')?)
}

fn load_hermitian(arg: &str) -> Result<monometric::HermitianMatrix> {
    jsonio::parse_hermitian(&inline_or_file(arg, '{')?)
}

fn load_simplex(arg: &str) -> Result<SimplexPoint> {
    jsonio::parse_simplex(&inline_or_file(arg, '[')?)
}

fn load_simplex_tangent(arg: &str) -> Result<SimplexTangent> {
    jsonio::parse_simplex_tangent(&inline_or_file(arg, '[')?)
}

fn lookup_function(spec: &str) -> Result<MonotoneFunction> {
    cm_kernel::lookup(spec)
}

fn lookup_pair(spec: &str) -> Result<EmbeddingPair> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        return monometric::verify::corpus::lookup_corpus(name);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return tablefn::load_table_pair(path);
    }
    pullback::lookup_pair(spec)
}

/// Parses an inclusive dimension range written as `2..4` or `2..=4`.
fn parse_dims(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let cleaned = s.replace("..=", "..");
    let (lo, hi) = cleaned
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("dims must look like 2..4 (got '{s}')")))?;
    let lo: usize = lo
        .parse()
        .map_err(|_| Error::Parse(format!("bad dims '{s}'")))?;
    let hi: usize = hi
        .parse()
        .map_err(|_| Error::Parse(format!("bad dims '{s}'")))?;
    if lo < 2 || hi < lo {
        return Err(Error::Parse(format!("dims '{s}' out of order or below 2")));
    }
    Ok(lo..=hi)
}

fn config_of<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("config echo")
}

fn run(command: &Command, seed: u64) -> Result<Outcome> {
    match command {
        Command::Metric {
            action: MetricCmd::Eval(args),
        } => {
            let f = lookup_function(&args.f)?;
            let rho = load_density(&args.rho)?;
            let a = load_tangent(&args.a)?;
            let b = match &args.b {
                Some(spec) => load_tangent(spec)?,
                None => a.clone(),
            };
            if rho.dim() != a.dim() || rho.dim() != b.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    got: a.dim().max(b.dim()),
                });
            }
            let value = metric_eval(&f, &rho, &a, &b)?;
            Ok(Outcome {
                command: "metric eval",
                config: config_of(args),
                results: json!({ "value": value, "f": f.name(), "dims": rho.dim() }),
                pass: true,
            })
        }
        Command::Wyd(args) => {
            let rho = load_density(&args.rho)?;
            let a = load_hermitian(&args.a)?;
            if rho.dim() != a.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    got: a.dim(),
                });
            }
            let value = wyd_info(args.p, &rho, &a);
            Ok(Outcome {
                command: "wyd",
                config: config_of(args),
                results: json!({ "value": value, "p": args.p, "dims": rho.dim() }),
                pass: true,
            })
        }
        Command::Fisher(args) => {
            let rho = load_simplex(&args.rho)?;
            let a = load_simplex_tangent(&args.a)?;
            let b = match &args.b {
                Some(spec) => load_simplex_tangent(spec)?,
                None => a.clone(),
            };
            if rho.dim() != a.dim() || rho.dim() != b.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    got: a.dim().max(b.dim()),
                });
            }
            let value = fisher_info(&rho, &a, &b);
            Ok(Outcome {
                command: "fisher",
                config: config_of(args),
                results: json!({ "value": value, "dims": rho.dim() }),
                pass: true,
            })
        }
        Command::Pairing {
            action: PairingCmd::Check(args),
        } => {
            let f = lookup_function(&args.f)?;
            let pair = lookup_pair(&args.pair)?;
            let dims = parse_dims(&args.dims)?;
            let report = pairing_report(&f, &pair, dims, args.trials, seed)?;
            let pass = report.pass;
            Ok(Outcome {
                command: "pairing check",
                config: config_of(args),
                results: serde_json::to_value(&report)?,
                pass,
            })
        }
        Command::Opmono {
            action: OpmonoCmd::Test(args),
        } => {
            let f = lookup_function(&args.f)?;
            let loewner = loewner_test(&f, args.points, args.sets, seed)?;
            let search = opmono_matrix_search(&f, parse_dims(&args.dims)?, args.trials, seed)?;
            if let Some(path) = &args.witness_csv {
                if let Some(w) = loewner.witness.as_ref().or(search.witness.as_ref()) {
                    write_witness_csv(path, w)?;
                }
            }
            let pass = loewner.passed() && search.passed();
            Ok(Outcome {
                command: "opmono test",
                config: config_of(args),
                results: json!({ "loewner": loewner, "matrix_search": search }),
                pass,
            })
        }
        Command::Channel {
            action: ChannelCmd::Contract(args),
        } => {
            let f = lookup_function(&args.f)?;
            let verdict = contraction_test(&f, args.trials, parse_dims(&args.dims)?, seed)?;
            if let Some(path) = &args.witness_csv {
                if let Some(w) = &verdict.witness {
                    write_witness_csv(path, w)?;
                }
            }
            let pass = verdict.passed();
            Ok(Outcome {
                command: "channel contract",
                config: config_of(args),
                results: serde_json::to_value(&verdict)?,
                pass,
            })
        }
        Command::Characterize(args) => {
            let pair = lookup_pair(&args.pair)?;
            let opts = CharacterizeOptions {
                symmetry_tol: args.symmetry_tol,
                homogeneity_tol: args.homogeneity_tol,
                slope_tol: args.slope_tol,
                loewner_points: args.points,
                loewner_sets: args.sets,
                seed,
            };
            let report = characterize_pair_with(&pair, &opts)?;
            let pass = report.pass;
            Ok(Outcome {
                command: "characterize",
                config: config_of(args),
                results: serde_json::to_value(&report)?,
                pass,
            })
        }
        Command::RvIndex(args) => {
            let side = Side::parse(&args.side)?;
            let t_grid: Option<Vec<f64>> = match &args.t {
                Some(csv) => Some(
                    csv.split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad multiplier '{s}'")))
                        })
                        .collect::<Result<_>>()?,
                ),
                None => None,
            };
            let xs: Option<Vec<f64>> =
                if args.terms.is_some() || args.ratio.is_some() || args.x0.is_some() {
                    let terms = args.terms.unwrap_or(20);
                    let ratio = args.ratio.unwrap_or(10.0);
                    let x0 = args.x0.unwrap_or(match side {
                        Side::Zero => 1e-2,
                        Side::Infinity => 1e2,
                    });
                    Some(
                        (0..terms)
                            .map(|k| match side {
                                Side::Zero => x0 / ratio.powi(k as i32),
                                Side::Infinity => x0 * ratio.powi(k as i32),
                            })
                            .collect(),
                    )
                } else {
                    None
                };
            let estimate = if let Some(path) = args.h.strip_prefix("table:") {
                let table = tablefn::load_table_fn(path)?;
                rv_index(&|x| table.eval(x), side, t_grid.as_deref(), xs.as_deref())?
            } else {
                let (_, h) = monometric::verify::lookup_h(&args.h)?;
                rv_index(h.as_ref(), side, t_grid.as_deref(), xs.as_deref())?
            };
            Ok(Outcome {
                command: "rv-index",
                config: config_of(args),
                results: serde_json::to_value(&estimate)?,
                pass: true,
            })
        }
        Command::KernelSurface(args) => {
            let f = lookup_function(&args.f)?;
            let rows = write_kernel_surface(&f, args)?;
            Ok(Outcome {
                command: "kernel-surface",
                config: config_of(args),
                results: json!({ "out": args.out, "rows": rows, "f": f.name() }),
                pass: true,
            })
        }
    }
}

fn grid_points(min: f64, max: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if steps == 0 || !(min > 0.0) || max < min {
        return Err(Error::InvalidParameter {
            name: "grid",
            message: format!("bad grid bounds {min}..{max} with {steps} steps"),
        });
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    Ok((0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            if log {
                min * (max / min).powf(t)
            } else {
                min + (max - min) * t
            }
        })
        .collect())
}

/// Writes rows `(x, y, c_f(x, y))` in row-major ascending order and returns
/// the number of data rows.
fn write_kernel_surface(f: &MonotoneFunction, args: &SurfaceArgs) -> Result<usize> {
    use std::io::Write;
    let xs = grid_points(args.x_min, args.x_max, args.x_steps, args.log)?;
    let ys = grid_points(args.y_min, args.y_max, args.y_steps, args.log)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(out, "x,y,c").map_err(Error::Io)?;
    let mut rows = 0usize;
    for &x in &xs {
        for &y in &ys {
            let c = cm_kernel::cm_eval(f, x, y)?;
            writeln!(out, "{x},{y},{c}").map_err(Error::Io)?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// Flat CSV dump of a witness: Loewner point sets as `index,x` rows, matrix
/// witnesses as `matrix,i,j,re,im` rows.
fn write_witness_csv(path: &str, witness: &Witness) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    match witness {
        Witness::LoewnerSet { points, .. } => {
            writeln!(out, "index,x").map_err(Error::Io)?;
            for (i, x) in points.iter().enumerate() {
                writeln!(out, "{i},{x}").map_err(Error::Io)?;
            }
        }
        Witness::MatrixPair { a, b, .. } => {
            writeln!(out, "matrix,i,j,re,im").map_err(Error::Io)?;
            for (name, m) in [("a", a), ("b", b)] {
                write_matrix_rows(&mut out, name, m)?;
            }
        }
        Witness::Contraction(w) => {
            writeln!(out, "matrix,i,j,re,im").map_err(Error::Io)?;
            write_matrix_rows(&mut out, "rho", &w.rho)?;
            write_matrix_rows(&mut out, "direction", &w.direction)?;
            for (r, k) in w.kraus.iter().enumerate() {
                write_matrix_rows(&mut out, &format!("kraus{r}"), k)?;
            }
        }
    }
    Ok(())
}

fn write_matrix_rows(
    out: &mut impl std::io::Write,
    name: &str,
    m: &monometric::jsonio::MatrixJson,
) -> Result<()> {
    for (i, row) in m.rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            writeln!(out, "{name},{i},{j},{re},{im}").map_err(Error::Io)?;
        }
    }
    Ok(())
}
