mod common;

use std::process::{Command, Output};

use common::*;
use lq::{lq, round4, ExponentPolicy, Portfolio};

fn lq_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lq"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn compute_breakdown_matches_golden_files() {
    for name in ["five_languages", "mixed_union", "serbian"] {
        let pf = format!("{name}.pf");
        let args = ["compute", "--taxonomy", "sample.tax", "--portfolio", &pf, "--breakdown"];
        let first = lq_bin(&args);
        let second = lq_bin(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "{name} differs between runs");
        assert_eq!(stdout(&first), golden(name), "{name}");
    }
}

#[test]
fn worked_example_lines() {
    let out = stdout(&lq_bin(&[
        "compute", "--taxonomy", "sample.tax", "--portfolio", "five_languages.pf", "--breakdown",
    ]));
    let value = |node: &str| -> f64 {
        let line = out.lines().find(|l| l.split_whitespace().next() == Some(node)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert!((value("Western") - 1.63).abs() <= 0.01);
    assert!((value("Indo-European") - 1.84).abs() <= 0.01);
    let last = out.lines().last().unwrap();
    let score: f64 = last.strip_prefix("LQ = ").unwrap().parse().unwrap();
    assert!((score - 2.84).abs() <= 0.01);
}

#[test]
fn printed_scores_equal_library_scores() {
    let tree = sample();
    for name in ["five_languages", "mixed_union", "serbian"] {
        let pf = format!("{name}.pf");
        for policy in ["sqrt", "identity", "pow:0.75"] {
            let out = stdout(&lq_bin(&[
                "compute", "--taxonomy", "sample.tax", "--portfolio", &pf, "--policy", policy,
            ]));
            let printed: f64 = out.trim().strip_prefix("LQ = ").unwrap().parse().unwrap();
            let p = Portfolio::from_json(&fixture(&pf)).unwrap();
            let lib = lq(&tree, &p, &policy.parse::<ExponentPolicy>().unwrap()).unwrap().score;
            assert_eq!(printed, round4(lib), "{name} {policy}");
        }
    }
}

#[test]
fn matrix_endpoint_value() {
    let o = lq_bin(&["matrix", "--rho", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2.0000\n");
    assert_eq!(stdout(&lq_bin(&["matrix", "--rho", "1", "--r", "3"])), "1.0000\n");
    assert_eq!(stdout(&lq_bin(&["matrix", "--rho", "0.5"])), "1.5000\n");
}

#[test]
fn check_axioms_exit_codes() {
    let o = lq_bin(&["check-axioms", "--taxonomy", "sample.tax", "--trials", "1000", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for tag in ["E ", "S ", "ND ", "I ", "PH ", "SW ", "MON ", "RNG "] {
        assert!(text.lines().any(|l| l.starts_with(tag) && l.contains("pass")), "{tag}");
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pf");
    std::fs::write(&bad, r#"{"languages": {"Klingon": 1}}"#).unwrap();
    let bad = bad.to_str().unwrap();

    let o = lq_bin(&["compute", "--taxonomy", "sample.tax", "--portfolio", bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("Klingon"));

    assert_eq!(lq_bin(&["matrix", "--rho", "1.5"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["matrix", "--rho", "0.5", "--r", "0"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["compute", "--taxonomy", "missing.tax", "--portfolio", "serbian.pf"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["suggest", "--taxonomy", "sample.tax", "--portfolio", "serbian.pf", "--top", "0"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["compute", "--taxonomy", "sample.tax", "--portfolio", "serbian.pf", "--policy", "pow:-1"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lq_bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn suggest_whatif_optimize_languages() {
    let out = stdout(&lq_bin(&["suggest", "--taxonomy", "sample.tax", "--portfolio", "serbian.pf", "--top", "2"]));
    let names: Vec<_> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["Chinese", "English"]);

    let out = stdout(&lq_bin(&[
        "whatif", "--taxonomy", "sample.tax", "--portfolio", "serbian.pf", "--add", "Chinese",
    ]));
    assert_eq!(out, "base = 1.0000\nnew  = 2.0000\ngain = 1.0000\n");

    let out = stdout(&lq_bin(&["optimize", "--taxonomy", "sample.tax", "--problem", "bundle.problem"]));
    assert!(out.starts_with("bundle: "));
    assert!(out.contains("method: exhaustive"));

    let out = stdout(&lq_bin(&["languages", "--taxonomy", "sample.tax", "--query", "S"]));
    let names: Vec<_> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["Serbian", "Slovene"]);
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let taxonomy = data_path("sample.tax");
    let portfolio = data_path("five_languages.pf");
    let code = lq::cli::run(
        ["lq", "compute", "--taxonomy", &taxonomy, "--portfolio", &portfolio, "--breakdown"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), golden("five_languages"));
}
