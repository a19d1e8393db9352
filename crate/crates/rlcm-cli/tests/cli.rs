//! End-to-end tests of the `rlcm` binary: the documented output and exit-code
//! contract, representation-file handling, and report round-trips.

use std::process::{Command, Output};

use tempfile::TempDir;

fn rlcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlcm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_rep(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

// ---------------------------------------------------------------------------
// lcm
// ---------------------------------------------------------------------------

#[test]
fn lcm_of_braid_atoms_is_the_braid_word() {
    let out = rlcm(&["lcm", "--semigroup", "artin:[[1,3],[3,1]]", "e1", "e2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "e1.e2.e1\n");
}

#[test]
fn lcm_of_distinct_free_atoms_is_disjoint() {
    let out = rlcm(&["lcm", "--semigroup", "free:2", "a", "b"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "DISJOINT\n");
}

#[test]
fn lcm_in_the_affine_monoid_solves_the_congruences() {
    let out = rlcm(&["lcm", "--semigroup", "nxn", "1,2", "0,3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "3,6\n");
}

#[test]
fn lcm_of_coordinate_tuples_is_the_componentwise_max() {
    let out = rlcm(&["lcm", "--semigroup", "nk:2", "1,2", "0,3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1,3\n");
}

#[test]
fn lcm_accepts_atom_words_for_coordinates() {
    let out = rlcm(&["lcm", "--semigroup", "nk:2", "e1.e2.e2", "e2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1,2\n");
}

#[test]
fn lcm_in_a_graph_product_merges_commuting_parts() {
    let desc = r#"{"kind":"graph_product","vertices":[{"name":"u","semigroup":{"kind":"nk","k":1}},{"name":"v","semigroup":{"kind":"free","alphabet":2}}],"edges":[["u","v"]]}"#;
    let out = rlcm(&["lcm", "--semigroup", desc, "u:e1", "v:a.u:e1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "u:1.v:a\n");

    // The rendered closed form parses back.
    let out = rlcm(&["lcm", "--semigroup", desc, "u:1.v:a", "v:a.v:b"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "u:1.v:a.v:b\n");
}

#[test]
fn lcm_exhausting_the_step_budget_exits_2() {
    let out = rlcm(&[
        "lcm",
        "--semigroup",
        "artin:[[1,3],[3,1]]",
        "--depth",
        "0",
        "e1",
        "e2",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("undecided"));
}

#[test]
fn malformed_descriptors_and_flags_exit_64() {
    let out = rlcm(&["lcm", "--semigroup", "klein:4", "x", "y"]);
    assert_eq!(code(&out), 64);

    let out = rlcm(&["lcm", "--semigroup", "free:2", "a", "Q"]);
    assert_eq!(code(&out), 64);

    let out = rlcm(&["lcm", "--no-such-flag", "a", "b"]);
    assert_eq!(code(&out), 64);

    let out = rlcm(&["frobnicate"]);
    assert_eq!(code(&out), 64);
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

const FREE2_SCALAR_09: &str = r#"{
  "semigroup": {"kind": "free", "alphabet": 2},
  "dimension": 1,
  "generators": {"a": [[[0.9, 0]]], "b": [[[0.9, 0]]]}
}"#;

#[test]
fn check_witnesses_the_row_contraction_bound() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(&dir, "free.json", FREE2_SCALAR_09);
    let report = dir.path().join("report.json");
    let out = rlcm(&[
        "check",
        "--rep",
        &rep,
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("witness F = {a, b}"), "{text}");

    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let lambda = body["result"]["witness_lambda_min"].as_f64().unwrap();
    assert!((lambda - (1.0 - 2.0 * 0.81)).abs() <= 1e-9, "{lambda}");
}

#[test]
fn check_passes_a_diagonal_coordinate_representation() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "nk2.json",
        r#"{"semigroup":{"kind":"nk","k":2},"dimension":2,
            "generators":{"e1":[[[0.5,0],[0,0]],[[0,0],[0.6,0]]],
                          "e2":[[[0.7,0],[0,0]],[[0,0],[0.1,0]]]}}"#,
    );
    let out = rlcm(&["check", "--rep", &rep]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn check_reports_the_complete_bs_family() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "bs.json",
        r#"{"semigroup":{"kind":"bs","n":2,"m":3},"dimension":1,
            "generators":{"a":[[[0.5,0]]],"b":[[[1.0,0]]]}}"#,
    );
    let out = rlcm(&["check", "--rep", &rep]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("completeness: complete"), "{text}");
    assert!(text.contains("16"), "{text}");
}

#[test]
fn check_rejects_a_relation_violating_representation_with_exit_4() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "bs_bad.json",
        r#"{"semigroup":{"kind":"bs","n":2,"m":3},"dimension":1,
            "generators":{"a":[[[0.5,0]]],"b":[[[0.9,0]]]}}"#,
    );
    let out = rlcm(&["check", "--rep", &rep]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("relation"), "{}", stderr(&out));
}

#[test]
fn check_cross_checks_the_semigroup_flag_against_the_file() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(&dir, "free.json", FREE2_SCALAR_09);
    let out = rlcm(&["check", "--rep", &rep, "--semigroup", "free:2"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));

    let out = rlcm(&["check", "--rep", &rep, "--semigroup", "nk:2"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn unreadable_and_malformed_rep_files_exit_65() {
    let out = rlcm(&["check", "--rep", "/no/such/file.json"]);
    assert_eq!(code(&out), 65);

    let dir = TempDir::new().unwrap();
    let rep = write_rep(&dir, "broken.json", "{not json");
    let out = rlcm(&["check", "--rep", &rep]);
    assert_eq!(code(&out), 65);

    // Wrong matrix shape for the declared dimension.
    let rep = write_rep(
        &dir,
        "shape.json",
        r#"{"semigroup":{"kind":"free","alphabet":1},"dimension":2,
            "generators":{"a":[[[0.5,0]]]}}"#,
    );
    let out = rlcm(&["check", "--rep", &rep]);
    assert_eq!(code(&out), 65);
}

// ---------------------------------------------------------------------------
// dilate
// ---------------------------------------------------------------------------

#[test]
fn dilate_reports_the_non_psd_gram_of_unit_scalars() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "unit.json",
        r#"{"semigroup":{"kind":"free","alphabet":2},"dimension":1,
            "generators":{"a":[[[1.0,0]]],"b":[[[1.0,0]]]}}"#,
    );
    let out = rlcm(&["dilate", "--rep", &rep, "--radius", "1"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Gram not PSD"), "{text}");
    // The 3x3 kernel matrix of {e, a, b} has smallest eigenvalue 1 - sqrt(2).
    assert!(text.contains("-4.142135e-1") || text.contains("-4.142136e-1"), "{text}");
}

#[test]
fn dilating_the_zero_representation_yields_the_truncated_shift() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "zero.json",
        r#"{"semigroup":{"kind":"nk","k":1},"dimension":1,
            "generators":{"e1":[[[0.0,0]]]}}"#,
    );
    let report = dir.path().join("report.json");
    let out = rlcm(&[
        "dilate",
        "--rep",
        &rep,
        "--radius",
        "3",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let result = &body["result"];
    assert_eq!(result["quotient_dim"], 4);
    assert!(result["dilation_residual"].as_f64().unwrap() <= 1e-9);
    assert!(result["covariance_max_residual"].as_f64().unwrap() <= 1e-9);
    let matrix = result["operators"][0]["matrix"].as_array().unwrap();
    for (r, row) in matrix.iter().enumerate() {
        for (c, entry) in row.as_array().unwrap().iter().enumerate() {
            let re = entry[0].as_f64().unwrap();
            let im = entry[1].as_f64().unwrap();
            let expected = if r == c + 1 { 1.0 } else { 0.0 };
            assert!((re - expected).abs() <= 1e-9 && im.abs() <= 1e-9, "({r},{c})");
        }
    }
}

#[test]
fn dilate_checks_covariance_of_a_contractive_pair() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "row.json",
        r#"{"semigroup":{"kind":"free","alphabet":2},"dimension":1,
            "generators":{"a":[[[0.6,0]]],"b":[[[0.5,0]]]}}"#,
    );
    let report = dir.path().join("report.json");
    let out = rlcm(&[
        "dilate",
        "--rep",
        &rep,
        "--radius",
        "2",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let result = &body["result"];
    assert!(result["covariance_pairs_checked"].as_i64().unwrap() >= 1);
    assert!(result["covariance_max_residual"].as_f64().unwrap() <= 1e-8);
    assert!(result["dilation_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn affine_box_flag_is_rejected_off_the_affine_monoid() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "zero.json",
        r#"{"semigroup":{"kind":"nk","k":1},"dimension":1,
            "generators":{"e1":[[[0.0,0]]]}}"#,
    );
    let out = rlcm(&["dilate", "--rep", &rep, "--affine-box", "3,4"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn dilate_runs_on_the_affine_monoid_with_a_box_truncation() {
    let dir = TempDir::new().unwrap();
    // A zero translation image makes every relation involving `plus` hold
    // identically; the prime images commute because scalars do.
    let rep = write_rep(
        &dir,
        "affine.json",
        r#"{"semigroup":{"kind":"nxn"},"dimension":1,
            "generators":{"plus":[[[0.0,0]]],"p2":[[[0.5,0]]],"p3":[[[0.5,0]]]}}"#,
    );
    let out = rlcm(&[
        "dilate",
        "--rep",
        &rep,
        "--affine-box",
        "2,3",
        "--prime-bound",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{} {}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("V(1,1)"), "{}", stdout(&out));
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

#[test]
fn certify_accepts_the_braid_generators() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "braid.json",
        r#"{"semigroup":{"kind":"artin","matrix":[[1,3],[3,1]]},"dimension":1,
            "generators":{"e1":[[[0.6,0]]],"e2":[[[0.6,0]]]}}"#,
    );
    let out = rlcm(&["certify", "--rep", &rep, "e1.e2", "e2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("certified positive"), "{}", stdout(&out));
}

#[test]
fn certify_flags_a_non_positive_family() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(&dir, "free.json", FREE2_SCALAR_09);
    let out = rlcm(&["certify", "--rep", &rep, "a", "b"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stdout(&out).contains("NOT certified"), "{}", stdout(&out));
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[test]
fn reports_replay_and_verify() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(
        &dir,
        "bs.json",
        r#"{"semigroup":{"kind":"bs","n":2,"m":3},"dimension":1,
            "generators":{"a":[[[0.5,0]]],"b":[[[1.0,0]]]}}"#,
    );
    let report = dir.path().join("report.json");
    let out = rlcm(&["check", "--rep", &rep, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = rlcm(&["verify", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("verification OK"), "{}", stdout(&out));
}

#[test]
fn verify_detects_a_tampered_report() {
    let dir = TempDir::new().unwrap();
    let rep = write_rep(&dir, "free.json", FREE2_SCALAR_09);
    let report = dir.path().join("report.json");
    let out = rlcm(&["check", "--rep", &rep, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));

    let mut body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    body["result"]["verdict"] = serde_json::Value::Bool(true);
    std::fs::write(&report, serde_json::to_string_pretty(&body).unwrap()).unwrap();

    let out = rlcm(&["verify", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("verification FAILED"), "{}", stderr(&out));
}

#[test]
fn verify_rejects_a_malformed_report_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("not_a_report.json");
    std::fs::write(&path, "{}").unwrap();
    let out = rlcm(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
}

#[test]
fn descriptor_file_indirection_works() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("desc.json");
    std::fs::write(&path, r#"{"kind":"free","alphabet":2}"#).unwrap();
    let arg = format!("@{}", path.display());
    let out = rlcm(&["lcm", "--semigroup", &arg, "a", "a.b"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "a.b\n");
}
