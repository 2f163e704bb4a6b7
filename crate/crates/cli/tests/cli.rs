//! End-to-end runs of the binary: artifact layout, exit codes, and the
//! determinism contract.

use std::path::Path;
use std::process::{Command, Output};

fn chromax(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chromax"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.to_string()).collect())
        .collect();
    (header, rows)
}

const LAPLACE_DEMO: &str = r#"{
  "kernel": {"type": "laplace"},
  "weight": {"type": "laguerre", "alpha": 0.0},
  "x0": 1.0,
  "fhat": {"type": "exp_decay", "rate": 1.0},
  "degrees": [2, 4, 8],
  "norm_grid": {"lo": 0.0, "hi": 25.0, "panels": 32, "order": 10, "grade_lo": true}
}"#;

#[test]
fn converge_emits_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "demo.json", LAPLACE_DEMO);
    let out = chromax(&["converge", "--config", &cfg, "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("run/converge.csv"));
    assert_eq!(header, "n,lhs_norm,en_proxy,ratio");
    assert_eq!(rows.len(), 3);
    let lhs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(lhs.windows(2).all(|w| w[1] < w[0]), "lhs column {lhs:?}");
    for row in &rows {
        let ratio: f64 = row[3].parse().unwrap();
        assert!(ratio.is_finite() && ratio <= 10.0, "ratio {ratio}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "converge");
    assert!(manifest["library_version"].is_string());
    assert_eq!(manifest["config"]["seed"], 7);
    assert_eq!(manifest["config"]["mode"], "dvp");
}

#[test]
fn identical_config_and_seed_give_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "demo.json", LAPLACE_DEMO);
    for out in ["a", "b"] {
        let run = chromax(
            &["converge", "--config", &cfg, "--out", out, "--seed", "3"],
            dir.path(),
        );
        assert!(run.status.success());
    }
    let a = std::fs::read(dir.path().join("a/converge.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/converge.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn empty_degree_list_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"degrees": []}"#);
    let out = chromax(&["converge", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degree list"), "stderr: {err}");
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"weigth": {"type": "hermite"}}"#);
    let out = chromax(&["recur", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown field"), "stderr: {err}");
}

#[test]
fn command_tag_must_match_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tag.json", r#"{"command": "quad"}"#);
    let out = chromax(&["recur", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn poisson_diag_reports_the_admissibility_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = chromax(
        &["diag", "--kernel", "poisson", "--n", "1", "--out", "d"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("d/diag.csv"));
    assert_eq!(header, "check,value");
    let adm: f64 = rows
        .iter()
        .find(|r| r[0] == "admissibility")
        .expect("admissibility row")[1]
        .parse()
        .unwrap();
    assert!((adm - 1.0).abs() < 1e-4, "admissibility {adm}");
}

#[test]
fn numerical_failure_exits_2_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "flat.json", r#"{"weight": {"type": "unit"}}"#);
    let out = chromax(&["recur", "--config", &cfg, "--out", "nf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("numerical_failure"), "stderr: {err}");
    let diag: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("nf/error.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(diag["error"], "numerical_failure");
    assert_eq!(diag["command"], "recur");
}

#[test]
fn degree_override_wins_and_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "demo.json", LAPLACE_DEMO);
    let out = chromax(
        &[
            "converge", "--config", &cfg, "--out", "o", "--degrees", "2,4,8,12",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let (_, rows) = read_csv(&dir.path().join("o/converge.csv"));
    assert_eq!(rows.len(), 4);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["degrees"], serde_json::json!([2, 4, 8, 12]));
}

#[test]
fn reconstruct_matches_the_closed_form_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "recon.json",
        r#"{
          "kernel": {"type": "laplace"},
          "weight": {"type": "laguerre", "alpha": 0.0},
          "x0": 0.0,
          "fhat": {"type": "exp_decay", "rate": 0.5},
          "degrees": [4],
          "mode": "partial",
          "eval_grid": {"lo": 0.1, "hi": 3.0, "points": 7}
        }"#,
    );
    let out = chromax(&["reconstruct", "--config", &cfg, "--out", "r"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("r/reconstruct.csv"));
    assert_eq!(header, "n,x,re,im");
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let x: f64 = row[1].parse().unwrap();
        let re: f64 = row[2].parse().unwrap();
        let im: f64 = row[3].parse().unwrap();
        assert!((re - 1.0 / (x + 0.5)).abs() < 1e-8, "x={x} re={re}");
        assert_eq!(im, 0.0);
    }
}

#[test]
fn wavelet_window_error_shrinks_with_more_terms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "wav.json",
        r#"{
          "fhat": {"type": "exp_decay", "rate": 1.0},
          "degrees": [2, 8],
          "window": {"a_lo": 0.7, "a_hi": 1.3, "b_lo": 0.0, "b_hi": 0.5,
                     "a_points": 4, "b_points": 4}
        }"#,
    );
    let out = chromax(&["wavelet", "--config", &cfg, "--out", "w"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("w/wavelet.csv"));
    assert_eq!(header, "n_terms,window_error,anchor_error");
    let coarse: f64 = rows[0][1].parse().unwrap();
    let fine: f64 = rows[1][1].parse().unwrap();
    assert!(fine < coarse, "window error {fine} vs {coarse}");
    for row in &rows {
        let anchor: f64 = row[2].parse().unwrap();
        assert!(anchor < 1e-9, "anchor error {anchor}");
    }
}

#[test]
fn walsh_suite_reports_exact_identities() {
    let dir = tempfile::tempdir().unwrap();
    let out = chromax(&["walsh", "--out", "ws", "--seed", "11"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("ws/walsh.csv"));
    assert_eq!(header, "check,value");
    for name in [
        "character_identity_max_abs_residual",
        "indicator_transform_max_abs_residual",
        "eigenvalue_identity_max_abs_residual",
    ] {
        let v: f64 = rows.iter().find(|r| r[0] == name).expect(name)[1]
            .parse()
            .unwrap();
        assert_eq!(v, 0.0, "{name}");
    }
    for name in ["hausdorff_young_min_margin_p1", "hausdorff_young_min_margin_p2"] {
        let v: f64 = rows.iter().find(|r| r[0] == name).expect(name)[1]
            .parse()
            .unwrap();
        assert!(v >= -1e-12, "{name} = {v}");
    }
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = chromax(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}
