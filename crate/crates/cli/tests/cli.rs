// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use schur_shadows::schur::{load_basis, save_basis};
use schur_shadows::Complex64;
use tempfile::TempDir;

struct Cli {
    dir: TempDir,
}

impl Cli {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_schur-shadows"))
            .arg("-q")
            .args(args)
            .env("SCHUR_SHADOWS_CACHE_DIR", self.dir.path().join("cache"))
            .output()
            .unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn basis_build_prints_dimensions() {
    let cli = Cli::new();
    let out = cli.run(&["basis", "build", "--d", "2", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("(3): dim_Q=4 dim_P=1"), "{text}");
    assert!(text.contains("(2,1): dim_Q=2 dim_P=2"), "{text}");
    assert!(text.contains("total 8"), "{text}");
}

#[test]
fn basis_build_rejects_zero_dimension() {
    let cli = Cli::new();
    assert_eq!(code(&cli.run(&["basis", "build", "--d", "0", "--n", "3"])), 2);
}

#[test]
fn basis_verify_detects_perturbation() {
    let cli = Cli::new();
    let file = cli.path("b.json");
    assert_eq!(
        code(&cli.run(&["basis", "build", "--d", "2", "--n", "3", "--out", p(&file)])),
        0
    );
    let out = cli.run(&["basis", "verify", "--path", p(&file)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let mut basis = load_basis(&file).unwrap();
    basis.blocks_mut()[0].vectors[0].terms_mut()[0].1 += Complex64::new(1e-3, 0.0);
    save_basis(&basis, &file).unwrap();
    let out = cli.run(&["basis", "verify", "--path", p(&file)]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["gram_max_deviation"].as_f64().unwrap() > 1e-4);
}

#[test]
fn basis_verify_missing_file_is_usage_error() {
    let cli = Cli::new();
    let missing = cli.path("absent.json");
    assert_eq!(code(&cli.run(&["basis", "verify", "--path", p(&missing)])), 2);
}

#[test]
fn shadow_run_clears_the_bar() {
    let cli = Cli::new();
    let out = cli.run(&[
        "shadow", "run", "--d", "2", "--rank", "2", "--trials", "60", "--seed", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("pass"));
}

#[test]
fn shadow_run_is_deterministic() {
    let cli = Cli::new();
    for format in ["json", "csv"] {
        let a = cli.path(&format!("a.{format}"));
        let b = cli.path(&format!("b.{format}"));
        for f in [&a, &b] {
            let args = [
                "shadow",
                "run",
                "--trials",
                "12",
                "--seed",
                "11",
                "--format",
                format,
                "--out",
                p(f),
            ];
            assert_eq!(code(&cli.run(&args)), 0);
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{format}");
    }
    let csv = std::fs::read_to_string(cli.path("a.csv")).unwrap();
    assert!(csv.starts_with("trial,segment_lambdas,estimate,truth,abs_error,accepted_samples,wall_ms"));
    assert_eq!(csv.lines().count(), 13);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(cli.path("a.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["config"]["segments"], 327);
    assert_eq!(json["trials"].as_array().unwrap().len(), 12);
}

#[test]
fn observable_above_bound_is_usage_error() {
    let cli = Cli::new();
    let obs = cli.path("o.json");
    std::fs::write(&obs, "[[3, 0], [0, -3]]").unwrap();
    let spec = format!("file:{}", p(&obs));
    let out = cli.run(&["shadow", "run", "--obs", &spec, "--b", "2", "--trials", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn shadow_run_rejects_too_few_copies() {
    let cli = Cli::new();
    assert_eq!(code(&cli.run(&["shadow", "run", "--n", "100", "--trials", "2"])), 2);
}

#[test]
fn oracle_moments_report() {
    let cli = Cli::new();
    let file = cli.path("m.json");
    let out = cli.run(&[
        "oracle",
        "--d",
        "2",
        "--n",
        "4",
        "--lambda",
        "3,1",
        "--samples",
        "4000",
        "--out",
        p(&file),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&file).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn oracle_rejects_mismatched_size() {
    let cli = Cli::new();
    assert_eq!(
        code(&cli.run(&["oracle", "--d", "2", "--n", "5", "--lambda", "3,1"])),
        2
    );
}

#[test]
fn oracle_symmetric_state_variance() {
    let cli = Cli::new();
    let out = cli.run(&["oracle", "--appendix-d", "--p", "2", "--q", "2"]);
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).contains(&format!("{:.10}", 36.0 / 7.0)),
        "{}",
        stdout(&out)
    );
}

#[test]
fn oracle_povm_completeness() {
    let cli = Cli::new();
    let out = cli.run(&["oracle", "--d", "3", "--povm", "--lambda", "2,1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn oracle_size_cap_exit_code() {
    let cli = Cli::new();
    assert_eq!(code(&cli.run(&["oracle", "--d", "3", "--lambda", "3,2,1"])), 3);
}

#[test]
fn scaling_grid() {
    let cli = Cli::new();
    assert_eq!(code(&cli.run(&["bench", "scaling", "--t", ""])), 2);
    let file = cli.path("s.csv");
    let out = cli.run(&[
        "bench",
        "scaling",
        "--t",
        "2,8",
        "--ranks",
        "1",
        "--trials",
        "20",
        "--out",
        p(&file),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&file).unwrap();
    assert!(csv.starts_with("protocol,rank,segments,copies,bound,trials,mean_abs_error,std_error,scaled_error"));
    assert_eq!(csv.lines().count(), 5);
}
