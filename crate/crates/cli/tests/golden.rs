//! Golden corpus: recorded invocations must reproduce byte-identical reports
//! under a fixed seed, and every subcommand must honor the exit-code
//! contract (0 pass, 1 fail verdict, 2 usage/validation error).
//!
//! Regenerate snapshots with `GOLDEN_REGEN=1 cargo test -p monometric-cli`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    expect_exit: i32,
    /// File produced in the working directory to snapshot as well.
    artifact: Option<&'static str>,
}

const CASES: &[Case] = &[
    Case {
        name: "metric-eval-wyd",
        args: &[
            "metric", "eval", "--f", "wyd:p=0.5", "--rho", "rho_diag.json", "--a", "sigma_x.json",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "metric-eval-bures",
        args: &[
            "metric", "eval", "--f", "bures", "--rho", "rho_diag.json", "--a", "sigma_x.json",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "metric-eval-cross",
        args: &[
            "metric", "eval", "--f", "bkm", "--rho", "rho_diag.json", "--a", "sigma_x.json",
            "--b", "sigma_z.json",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "wyd-info",
        args: &["wyd", "--p", "0.5", "--rho", "rho_diag.json", "--a", "sigma_x.json"],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "fisher-uniform",
        args: &["fisher", "--rho", "[0.5,0.5]", "--a", "[1,-1]"],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "fisher-skew",
        args: &["fisher", "--rho", "[0.9,0.1]", "--a", "[1,-1]"],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "pairing-match",
        args: &[
            "pairing", "check", "--f", "wyd:p=0.5", "--pair", "p=0.5", "--dims", "2..4",
            "--trials", "50",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "pairing-mismatch",
        args: &[
            "pairing", "check", "--f", "bures", "--pair", "p=0.5", "--dims", "2..3", "--trials",
            "20",
        ],
        expect_exit: 1,
        artifact: None,
    },
    Case {
        name: "opmono-pass",
        args: &[
            "opmono", "test", "--f", "power:nu=1.5", "--points", "8", "--sets", "60", "--dims",
            "2..3", "--trials", "120",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "opmono-fail",
        args: &[
            "opmono", "test", "--f", "wyd:p=3", "--points", "8", "--sets", "60", "--dims",
            "2..3", "--trials", "120", "--witness-csv", "witness.csv",
        ],
        expect_exit: 1,
        artifact: Some("witness.csv"),
    },
    Case {
        name: "channel-pass",
        args: &[
            "channel", "contract", "--f", "bures", "--trials", "100", "--dims", "2..3",
        ],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "channel-fail",
        args: &[
            "channel", "contract", "--f", "square", "--trials", "200", "--dims", "2..3",
        ],
        expect_exit: 1,
        artifact: None,
    },
    Case {
        name: "characterize-pass",
        args: &["characterize", "--pair", "p=0.5"],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "characterize-corpus",
        args: &["characterize", "--pair", "corpus:scaled-log"],
        expect_exit: 1,
        artifact: None,
    },
    Case {
        name: "rv-index-powlog",
        args: &["rv-index", "--h", "powlog:p=0.5", "--side", "zero"],
        expect_exit: 0,
        artifact: None,
    },
    Case {
        name: "kernel-surface",
        args: &[
            "kernel-surface", "--f", "bures", "--x-min", "1", "--x-max", "3", "--x-steps", "3",
            "--y-min", "1", "--y-max", "3", "--y-steps", "3", "--out", "surface.csv",
        ],
        expect_exit: 0,
        artifact: Some("surface.csv"),
    },
    Case {
        name: "invalid-density",
        args: &[
            "metric", "eval", "--f", "wyd:p=0.5", "--rho", "bad_rho.json", "--a", "sigma_x.json",
        ],
        expect_exit: 2,
        artifact: None,
    },
];

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_case(case: &Case, workdir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monometric"))
        .args(case.args)
        .args(["--no-timing", "--seed", "42"])
        .current_dir(workdir)
        .env_remove("MONOMETRIC_SEED")
        .output()
        .expect("spawn monometric")
}

#[test]
fn golden_corpus_is_reproducible() {
    let regen = std::env::var("GOLDEN_REGEN").is_ok();
    let tmp = tempfile::tempdir().expect("tempdir");
    for entry in fs::read_dir(fixtures_dir()).expect("fixtures") {
        let entry = entry.unwrap();
        fs::copy(entry.path(), tmp.path().join(entry.file_name())).unwrap();
    }

    let mut failures = Vec::new();
    for case in CASES {
        let first = run_case(case, tmp.path());
        let second = run_case(case, tmp.path());

        let exit = first.status.code().unwrap_or(-1);
        if exit != case.expect_exit {
            failures.push(format!(
                "{}: exit {exit}, expected {} (stderr: {})",
                case.name,
                case.expect_exit,
                String::from_utf8_lossy(&first.stderr)
            ));
            continue;
        }
        if first.stdout != second.stdout {
            failures.push(format!("{}: two runs differ byte-wise", case.name));
            continue;
        }

        let snapshot = golden_dir().join(format!("{}.stdout", case.name));
        if regen {
            fs::write(&snapshot, &first.stdout).unwrap();
        } else {
            let expected = fs::read(&snapshot)
                .unwrap_or_else(|_| panic!("missing snapshot {}", snapshot.display()));
            if expected != first.stdout {
                failures.push(format!("{}: stdout diverged from snapshot", case.name));
            }
        }

        if let Some(artifact) = case.artifact {
            let produced = fs::read(tmp.path().join(artifact))
                .unwrap_or_else(|_| panic!("{}: artifact {artifact} not written", case.name));
            let snapshot = golden_dir().join(format!("{}.{artifact}", case.name));
            if regen {
                fs::write(&snapshot, &produced).unwrap();
            } else {
                let expected = fs::read(&snapshot)
                    .unwrap_or_else(|_| panic!("missing snapshot {}", snapshot.display()));
                if expected != produced {
                    failures.push(format!("{}: artifact {artifact} diverged", case.name));
                }
            }
        }
    }

    let ok = failures.is_empty();
    println!(
        "acceptance criterion 9 (cli golden suite): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "golden failures:\n{}", failures.join("\n"));
}

#[test]
fn seed_env_variable_is_honored() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = Command::new(env!("CARGO_BIN_EXE_monometric"))
        .args(["rv-index", "--h", "pow:p=1", "--no-timing"])
        .current_dir(tmp.path())
        .env("MONOMETRIC_SEED", "7")
        .output()
        .expect("spawn");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"seed\": 7"), "report was: {text}");
}

#[test]
fn diagnostics_go_to_stderr() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = Command::new(env!("CARGO_BIN_EXE_monometric"))
        .args(["metric", "eval", "--f", "mystery", "--rho", "x.json", "--a", "y.json"])
        .current_dir(tmp.path())
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown spec"));
}
