//! End-to-end tests of the `aniso-shannon` binary.

use std::process::{Command, Output};

use aniso_shannon::VerificationReport;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aniso-shannon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const QUICK: [&str; 2] = ["--samples", "16384"];

#[test]
fn verify_json_round_trips_through_check_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let o = bin(&[
        "verify",
        "--preset",
        "heisenberg",
        "--out",
        p,
        QUICK[0],
        QUICK[1],
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rep = VerificationReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rep.records.len() >= 50);
    assert!(rep.all_passed());
    let o = bin(&["check-report", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok:"));
}

#[test]
fn tampered_report_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    bin(&["verify", "--functions", "gaussian", "--out", p]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["records"][0]["passed"] = serde_json::Value::Bool(false);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = bin(&["check-report", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("passed flag inconsistent"));

    v["surprise"] = serde_json::Value::Null;
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(bin(&["check-report", p]).status.code(), Some(2));
}

#[test]
fn csv_header_and_numbers() {
    let o = bin(&[
        "verify",
        "--format",
        "csv",
        "--functions",
        "extremizer;gaussian",
        "--alpha",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "inequality,function_id,alpha,deficit,error_estimate,passed"
    );
    assert_eq!(lines.count(), 6);
    let json = stdout(&bin(&[
        "verify",
        "--functions",
        "extremizer;gaussian",
        "--alpha",
        "2",
    ]));
    let rep = VerificationReport::from_json(&json).unwrap();
    for (row, rec) in text.lines().skip(1).zip(&rep.records) {
        let deficit: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(deficit, rec.deficit);
    }
}

#[test]
fn scan_cardinality_and_determinism() {
    let args = [
        "scan",
        "--functions",
        "extremizer,stretched:c=1,beta=2",
        "--alpha",
        "1.5",
        "--alpha",
        "2",
        "--alpha",
        "3",
        "--seed",
        "11",
    ];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1 + 18);
    assert!(text.starts_with("function_id,alpha,inequality,deficit,error_estimate,passed,status\n"));
    assert!(text.contains("\"stretched:c=1,beta=2\""));
    for row in text
        .lines()
        .filter(|l| l.starts_with("extremizer") && l.contains(",shannon,"))
    {
        let d: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(d.abs() < 1e-6, "{row}");
    }
}

#[test]
fn shannon_only_adds_low_exponents() {
    let o = bin(&["scan", "--functions", "gaussian", "--inequality", "shannon"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 5);
    assert!(text.contains("gaussian,0.5,shannon"));
}

#[test]
fn constant_override_fails_the_suite() {
    let o = bin(&["verify", "--constant-override", "A=1.0", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED shannon"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["verify", "--preset", "torus:3"],
        vec!["verify", "--alpha", "-1"],
        vec!["verify", "--functions", "sinc"],
        vec!["verify", "--norm", "p:x"],
        vec!["verify", "--weights", "1,0"],
        vec!["verify", "--preset", "heisenberg", "--weights", "1,2"],
        vec!["verify", "--rel-tol", "0.5"],
        vec!["verify", "--constant-override", "Z=1"],
        vec!["verify", "--no-such-flag"],
        vec!["sphere", "--preset", "abelian:1", "--preset", "abelian:2"],
    ] {
        let o = bin(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = bin(&[
        "verify",
        "--functions",
        "bump",
        "--alpha",
        "2",
        "--max-evals",
        "100",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rep = VerificationReport::from_json(&stdout(&o)).unwrap();
    assert!(rep.budget_exhausted());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"weights": [1, 2], "norm": {"variant": "max"}, "alpha": [2.0],
            "functions": ["gaussian"], "inequalities": ["shannon"], "format": "csv"}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = bin(&["verify", "--config", c]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = bin(&["verify", "--config", c, "--alpha", "1.5", "--alpha", "3"]);
    assert_eq!(stdout(&o).lines().count(), 3);

    std::fs::write(&cfg, r#"{"alphas": [2.0]}"#).unwrap();
    assert_eq!(bin(&["verify", "--config", c]).status.code(), Some(2));
}

#[test]
fn constants_table_ratio_at_least_one() {
    let o = bin(&[
        "constants",
        "--preset",
        "abelian:1",
        "--preset",
        "heisenberg",
        "--preset",
        "anisotropic:1,2",
        "--alpha",
        "1.1",
        "--alpha",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ratio = header.iter().position(|h| *h == "ratio").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let v: f64 = r.split(',').nth(ratio).unwrap().parse().unwrap();
        assert!(v >= 1.0, "{r}");
    }
}

#[test]
fn sphere_command_reports_agreement() {
    let o = bin(&["sphere", "--preset", "anisotropic:1,2", "--norm", "p"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], serde_json::Value::Bool(true));
    assert_eq!(v["estimates"].as_array().unwrap().len(), 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}
