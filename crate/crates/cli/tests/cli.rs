use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gossip-age")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

const DISCONNECTED: &str = r#"{"n": 4, "m": 2, "k": 2, "topology": "disconnected",
    "lambda_e": 1, "lambda_s": 1, "lambda_c": 1, "lambda": 1}"#;

#[test]
fn analytic_disconnected_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.json", DISCONNECTED);
    let out = bin(&["analytic", "--config", &cfg, "--out", "a.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv, "label,method,head_age,node_age,gap\nnode_age exact,exact,2,4,\n");
}

#[test]
fn analytic_custom_graph_reports_per_node_ages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"m": 1, "k": 3, "topology": "custom", "lambda_e": 1, "lambda_s": 1, "lambda_c": 1, "lambda": 1,
            "custom_graph": [[0, 1, 0], [0, 0, 1], [0, 0, 0]]}"#,
    );
    let out = bin(&["analytic", "--config", &cfg, "--out", "c.json.out.json"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("c.json.out.json")).unwrap()).unwrap();
    let per_node = doc["per_node"].as_array().unwrap();
    assert_eq!(per_node.len(), 3);
    assert_eq!(per_node[0].as_f64().unwrap(), 4.0);
}

#[test]
fn degenerate_ring_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        r#"{"n": 12, "k": 4, "topology": "uniring", "lambda_e": 1, "lambda_s": 1, "lambda_c": 1, "lambda": 0}"#,
    );
    let out = bin(&["analytic", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn invalid_inputs_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.json", DISCONNECTED);
    for args in [
        vec!["simulate", "--config", &cfg, "--replications", "0"],
        vec!["sweep", "--config", &cfg, "--out", "x.txt"],
        vec!["sweep", "--config", "missing.json"],
        vec!["scaling", "--topology", "custom"],
        vec!["--threads", "0", "simulate", "--config", &cfg],
    ] {
        let out = bin(&args, dir.path());
        let code = out.status.code();
        // a missing file is an i/o error rather than a config error
        let expected = if args.contains(&"missing.json") { 1 } else { 2 };
        assert_eq!(code, Some(expected), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bad = write(dir.path(), "bad.json", r#"{"n": 4, "topology": "ring"}"#);
    assert_eq!(bin(&["analytic", "--config", &bad], dir.path()).status.code(), Some(2));
}

#[test]
fn numeric_precondition_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["scaling", "--topology", "biring", "--sizes", "10,20,30,40"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_csv_ends_with_argmin_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.json", &DISCONNECTED.replace("\"n\": 4, \"m\": 2, \"k\": 2", "\"n\": 120, \"k\": 1"));
    let out = bin(&["sweep", "--config", &cfg, "--out", "s.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16 + 1);
    assert_eq!(csv.lines().last().unwrap(), "disconnected,120,argmin,10;12,22");
}

#[test]
fn scaling_json_has_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["scaling", "--topology", "full", "--out", "f.json"], dir.path());
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("f.json")).unwrap()).unwrap();
    assert!(doc["exponent"].as_f64().unwrap() < 0.2);
    assert!(doc["log_model"]["r_squared"].as_f64().unwrap() > 0.95);
    assert_eq!(doc["samples"].as_array().unwrap().len(), 6);
}

#[test]
fn reproduce_fig3_writes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["reproduce-fig3", "--panel", "d", "--out", "fig"], dir.path());
    assert!(out.status.success());
    let summary = std::fs::read_to_string(dir.path().join("fig/summary.csv")).unwrap();
    assert!(summary.contains("d,d-legend,1,10,1,2,full,24,"));
    assert_eq!(summary.lines().count(), 1 + 6);
    assert!(dir.path().join("fig/fig3d-text_biring.csv").exists());
}

#[test]
fn simulate_seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        &DISCONNECTED.replace("}", r#", "horizon": 2000, "replications": 3, "seed": 5}"#),
    );
    assert!(bin(&["simulate", "--config", &cfg, "--out", "a.csv"], dir.path()).status.success());
    assert!(bin(&["simulate", "--config", &cfg, "--seed", "6", "--out", "b.csv"], dir.path()).status.success());
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_ne!(a, b);
    assert_eq!(a.lines().count(), 1 + 3 + 1);
    let total: Vec<&str> = a.lines().last().unwrap().split(',').collect();
    assert_eq!(total[8], "5");
    assert!(!total[11].is_empty());
}
