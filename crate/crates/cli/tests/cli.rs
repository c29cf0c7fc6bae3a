//! End-to-end runs of the binary: exit codes, report schema, determinism.

use std::process::Command;

fn hms(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_hms"))
        .args(args)
        .env_remove("HMS_OUT_DIR")
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).to_string(),
        String::from_utf8_lossy(&output.stderr).to_string(),
    )
}

#[test]
fn verify_hms_passes_and_perturbed_run_reports_certificate() {
    let (code, stdout, _) = hms(&["verify-hms", "--weights", "1,1,2"]);
    assert_eq!(code, 0, "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["pass"], true);
    assert!(report["report"]["gauge"].is_array());

    // The perturbed run must refuse to match and carry the certificate;
    // the command itself passes because that is the expected outcome.
    let (code, stdout, _) = hms(&["verify-hms", "--weights", "1,1,2", "--perturb"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["report"]["pass"], false);
    assert!(report["report"]["obstruction"]["invariant_mismatch"].is_object());
}

#[test]
fn invalid_configurations_exit_2() {
    let (code, _, _) = hms(&["bside", "--weights", "0,1"]);
    assert_eq!(code, 2);
    let (code, _, _) = hms(&["mutate", "--weights", "1,1,4", "--fn-check", "4,9"]);
    assert_eq!(code, 2);
    let (code, _, _) = hms(&["monodromy"]);
    assert_eq!(code, 2);
}

#[test]
fn failing_check_exits_1() {
    // Too-tight escape bound: the degeneration classification fails.
    let (code, stdout, _) = hms(&[
        "monodromy",
        "--hirzebruch",
        "5",
        "--mode",
        "degeneration",
        "--b-param",
        "1e-8",
        "--escape-bound",
        "1e9",
    ]);
    assert_eq!(code, 1, "{stdout}");
}

#[test]
fn reports_are_deterministic() {
    let (c1, out1, _) = hms(&["aside", "--weights", "3,2,1", "--check", "discs"]);
    let (c2, out2, _) = hms(&["aside", "--weights", "3,2,1", "--check", "discs"]);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
}

#[test]
fn report_all_single_criterion() {
    let (code, stdout, stderr) = hms(&["report-all", "--criterion", "15"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stderr.contains("criterion 15"));
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["report"][0]["id"], 15);
    assert_eq!(report["report"][0]["pass"], true);
}

#[test]
fn svg_diagram_and_csv_trace() {
    let (code, stdout, _) = hms(&["aside", "--weights", "1,1,1", "--format", "svg"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("<svg"));
    let (code, stdout, _) = hms(&[
        "monodromy",
        "--weights",
        "1,1,1",
        "--loop",
        "origin",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let first = stdout.lines().next().unwrap();
    assert!(first.starts_with("origin,"), "{first}");
}
