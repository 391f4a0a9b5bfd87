use std::path::PathBuf;
use std::process::{Command, Output};

use frakgeo::VerificationReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frakgeo"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(cmd: &mut Command) -> (i32, String) {
    let Output { status, stdout, .. } = cmd.output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap())
}

#[test]
fn list_checks_names_every_registered_check() {
    let (code, out) = run(bin().arg("--list-checks"));
    assert_eq!(code, 0);
    let names: Vec<&str> = out
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    assert_eq!(
        names,
        [
            "hessian",
            "spray",
            "nconnection",
            "dconnection",
            "torsion",
            "structure",
            "symplectic",
            "compatibility",
            "finsler"
        ]
    );
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(bin().arg("--help")).0, 0);
    assert_eq!(run(bin().arg("--version")).0, 0);
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(run(bin().arg("--bogus")).0, 1);
    assert_eq!(
        run(bin().args(["check", "--config", "/nonexistent.json"])).0,
        1
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dimension": 1}"#).unwrap();
    assert_eq!(run(bin().arg("check").arg("--config").arg(&bad)).0, 1);
    let (code, _) = run(bin()
        .arg("check")
        .arg("--config")
        .arg(config("flat.json"))
        .args(["--alpha", "1.5"]));
    assert_eq!(code, 1);
}

#[test]
fn overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, stdout) = run(bin()
        .arg("check")
        .arg("--config")
        .arg(config("cross_half.json"))
        .args(["--alpha", "0.5", "--seed", "7", "--output"])
        .arg(&out));
    assert_eq!(code, 0);
    assert!(stdout.contains("0 fail"));
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.runs.len(), 1);
    assert_eq!(report.runs[0].alpha, 0.5);
    assert!(!report.runs[0].symbolic_capable);
}

#[test]
fn plain_square_degenerates_at_fractional_order() {
    // D^α D^α y² ∝ y^{2−2α} vanishes on the velocity terminal face
    let (code, stdout) = run(bin()
        .arg("check")
        .arg("--config")
        .arg(config("flat.json"))
        .args(["--alpha", "0.5"]));
    assert_eq!(code, 2);
    assert!(stdout.contains("not regular"));
}

#[test]
fn check_subset_runs_only_selected_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("subset.json");
    let text = std::fs::read_to_string(config("flat.json"))
        .unwrap()
        .replacen('{', r#"{"checks": ["compatibility", "hessian"],"#, 1);
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("r.json");
    let (code, _) = run(bin()
        .arg("report")
        .arg("--config")
        .arg(&cfg)
        .arg("--output")
        .arg(&out));
    assert_eq!(code, 0);
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let prefixes: Vec<&str> = report
        .records()
        .map(|r| r.name.split('/').next().unwrap())
        .collect();
    assert!(prefixes.starts_with(&["hessian"]));
    assert!(prefixes
        .iter()
        .all(|p| *p == "hessian" || *p == "compatibility"));
    assert_eq!(report.timing.wall_time_s.len(), 3);
}
