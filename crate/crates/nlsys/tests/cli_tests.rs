//! End-to-end tests of the command-line binary: table emission, run
//! artifacts, verification exit codes, and the documented error contract
//! (0 success, 1 verification failure, 2 configuration/schema error).

use nlsys::report::{branch_from_json, branch_to_json, sampling_from_json, verify_from_json};
use std::path::Path;
use std::process::{Command, Output};

fn nlsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("binary should not be killed by a signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("output should be UTF-8")
}

/// Parse one CSV body cell as f64, failing loudly with the row context.
fn cell(line: &str, index: usize) -> f64 {
    line.split(',')
        .nth(index)
        .unwrap_or_else(|| panic!("row {line:?} has no column {index}"))
        .parse()
        .unwrap_or_else(|e| panic!("column {index} of {line:?}: {e}"))
}

#[test]
fn thresholds_single_classical_cell_reports_ten() {
    let out = nlsys(&["thresholds", "--n-range", "1", "--s-range", "1", "--p-range", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = text.lines().nth(1).expect("one data row");
    assert_eq!(cell(row, 3), 10.0, "exponential-family bound at the classical order");
    let classical = 10.0 + 4.0 * 2.0f64.sqrt();
    assert!((cell(row, 4) - classical).abs() <= 1e-12 * classical);
}

#[test]
fn thresholds_power_sweep_decreases_toward_the_limit() {
    let out = nlsys(&[
        "thresholds",
        "--n-range",
        "3",
        "--s-range",
        "0.5",
        "--p-range",
        "2,3,5,10,100",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let bounds: Vec<f64> = text.lines().skip(1).map(|row| cell(row, 4)).collect();
    assert_eq!(bounds.len(), 5);
    for pair in bounds.windows(2) {
        assert!(pair[1] < pair[0], "bound should fall as the exponent grows");
    }
    // The large-exponent limit of the power bound is five times the order.
    assert!(bounds[4] > 5.0 && bounds[4] < 5.2);
}

#[test]
fn thresholds_empty_range_yields_an_empty_table() {
    let out = nlsys(&["thresholds", "--n-range", "", "--s-range", "0.5", "--p-range", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1, "header only");
}

#[test]
fn thresholds_pole_rows_are_annotated_not_fatal() {
    let out = nlsys(&["thresholds", "--n-range", "1", "--s-range", "0.5", "--p-range", "1,2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("skipped:"), "p = 1 is a pole of the power bound");
    assert!(!rows[1].contains("skipped:"));
}

#[test]
fn thresholds_json_table_is_valid_and_deterministic() {
    let args = [
        "thresholds",
        "--n-range",
        "2,4",
        "--s-range",
        "0.3,0.7",
        "--p-range",
        "2",
        "--format",
        "json",
    ];
    let first = nlsys(&args);
    assert_eq!(code(&first), 0);
    let text = stdout(&first);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(value["schema_version"], 1);
    assert_eq!(value["rows"].as_array().expect("rows array").len(), 4);
    let second = nlsys(&args);
    assert_eq!(stdout(&second), text, "same command, same bytes");
}

#[test]
fn criterion_crossover_matches_the_classical_threshold() {
    let out = nlsys(&[
        "criterion",
        "--family",
        "lane_emden",
        "--p",
        "2",
        "--n-range",
        "10",
        "--s-range",
        "0.999999",
        "--crossover",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row = text.lines().nth(1).expect("one data row");
    let crossover = cell(row, 5);
    let classical = 10.0 + 4.0 * 2.0f64.sqrt();
    assert!(
        (crossover - classical).abs() <= 0.05,
        "crossover {crossover} should sit near {classical}"
    );
}

#[test]
fn continue_small_run_finds_the_fold_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("branch.json");
    let csv_path = dir.path().join("branch.csv");
    let out = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "48",
        "--out",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let text = std::fs::read_to_string(&json_path).unwrap();
    let artifact = branch_from_json(&text).expect("emitted artifact validates");
    assert_eq!(artifact.status, "fold_found");
    let hi = artifact.bracket_high.expect("fold bracket closes");
    let width = hi - artifact.bracket_low;
    assert!(
        width <= 1e-3 * hi,
        "endpoint bracket width {width} should resolve the endpoint to 0.1%"
    );
    assert_eq!(branch_to_json(&artifact).unwrap(), text, "round trip is byte-identical");

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("lambda,gamma,sup_u,sup_v,stability,residual\n"));
    assert_eq!(csv.lines().count(), artifact.records.len() + 1);
}

#[test]
fn continue_zero_nodes_is_a_config_error_with_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("never.json");
    let out = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "0",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&json_path).exists(), "invalid config writes nothing");
}

#[test]
fn continue_singular_family_reaches_a_valid_ending() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("branch.json");
    let out = nlsys(&[
        "continue",
        "--family",
        "mems",
        "--p",
        "2",
        "--n",
        "32",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let artifact = branch_from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(
        artifact.status == "fold_found" || artifact.status == "constraint_hit",
        "got {}",
        artifact.status
    );
}

#[test]
fn config_file_overlay_yields_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(&config_path, "[continue]\nfamily = \"gelfand\"\nn = 32\ns = 0.4\n").unwrap();
    let json_path = dir.path().join("branch.json");
    let out = nlsys(&[
        "continue",
        "--config",
        config_path.to_str().unwrap(),
        "--s",
        "0.55",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let artifact = branch_from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(artifact.n, 32, "file value survives");
    assert_eq!(artifact.s, 0.55, "flag overrides the file");
}

#[test]
fn verify_fresh_branch_passes_all_checks() {
    let dir = tempfile::tempdir().unwrap();
    let branch_path = dir.path().join("branch.json");
    let report_path = dir.path().join("verify.json");
    let run = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "40",
        "--out",
        branch_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let out = nlsys(&[
        "verify",
        "--branch",
        branch_path.to_str().unwrap(),
        "--stride",
        "5",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = verify_from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report.all_pass);
    assert!(!report.reports.is_empty());
    assert_eq!(report.checks, ["stability", "residual", "corollary", "estimates"]);
}

#[test]
fn verify_detects_a_tampered_record() {
    let dir = tempfile::tempdir().unwrap();
    let branch_path = dir.path().join("branch.json");
    let run = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "40",
        "--out",
        branch_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);

    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&branch_path).unwrap()).unwrap();
    let slot = &mut value["records"][3]["u"][10];
    *slot = serde_json::json!(slot.as_f64().unwrap() + 0.1);
    let tampered_path = dir.path().join("tampered.json");
    std::fs::write(&tampered_path, serde_json::to_string(&value).unwrap()).unwrap();

    let out = nlsys(&[
        "verify",
        "--branch",
        tampered_path.to_str().unwrap(),
        "--checks",
        "stability,residual",
    ]);
    assert_eq!(code(&out), 1, "perturbed state must fail a hard check");
}

#[test]
fn verify_unknown_field_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let branch_path = dir.path().join("branch.json");
    let run = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "32",
        "--out",
        branch_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&branch_path).unwrap()).unwrap();
    value["surprise"] = serde_json::json!(1);
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&value).unwrap()).unwrap();

    let out = nlsys(&["verify", "--branch", bad_path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_empty_checks_selection_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let branch_path = dir.path().join("branch.json");
    let report_path = dir.path().join("verify.json");
    let run = nlsys(&[
        "continue",
        "--family",
        "gelfand",
        "--n",
        "32",
        "--out",
        branch_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let out = nlsys(&[
        "verify",
        "--branch",
        branch_path.to_str().unwrap(),
        "--checks",
        "",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = verify_from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report.all_pass);
    assert!(report.reports.is_empty());
}

#[test]
fn singular_check_matches_both_closed_forms() {
    let exp = nlsys(&["singular-check", "--s", "0.3"]);
    assert_eq!(code(&exp), 0);
    for row in stdout(&exp).lines().skip(1) {
        assert!(cell(row, 3) <= 1e-4, "relative error too large: {row}");
    }
    let pow = nlsys(&["singular-check", "--s", "0.3", "--p", "3"]);
    assert_eq!(code(&pow), 0);
    for row in stdout(&pow).lines().skip(1) {
        assert!(cell(row, 3) <= 1e-4, "relative error too large: {row}");
    }
}

#[test]
fn singular_check_rejects_points_outside_the_unit_interval() {
    let out = nlsys(&["singular-check", "--s", "0.3", "--points", "0.5,1.5"]);
    assert_eq!(code(&out), 2);
    let zero = nlsys(&["singular-check", "--s", "0.3", "--points", "0"]);
    assert_eq!(code(&zero), 2);
}

#[test]
fn bootstrap_splits_on_the_embedding_boundary() {
    let below = nlsys(&["bootstrap", "--n", "1.5", "--s", "0.5"]);
    assert_eq!(code(&below), 0);
    assert!(stdout(&below).contains("verdict bounded"));
    let above = nlsys(&["bootstrap", "--n", "3", "--s", "0.5", "--max-steps", "200"]);
    assert_eq!(code(&above), 0);
    assert!(stdout(&above).contains("verdict inconclusive"));
}

#[test]
fn inequalities_sample_run_is_clean_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("sampling.json");
    let out = nlsys(&[
        "inequalities",
        "--samples",
        "2000",
        "--seed",
        "3",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&report_path).unwrap();
    let artifact = sampling_from_json(&text).unwrap();
    assert_eq!(artifact.seed, 3);
    assert_eq!(artifact.reports.len(), 5);
    assert!(artifact.reports.iter().all(|r| r.violations == 0));
}

#[test]
fn thread_count_env_is_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(["bootstrap", "--n", "1.5", "--s", "0.5"])
        .env("NLSYS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let good = Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(["bootstrap", "--n", "1.5", "--s", "0.5"])
        .env("NLSYS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(good.status.code(), Some(0));
}
