use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasecraft"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn fig1_default_grid() {
    let o = run(&["fig1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# version: "));
    let rows = records(&text);
    assert_eq!(rows[0], ["state", "n_av", "f_q", "qcrb", "error"]);
    let noon: Vec<_> = rows.iter().filter(|r| r[0] == "noon").collect();
    assert_eq!(noon.len(), 5);
    assert_eq!(noon[2][2], "9");
    assert!(rows.iter().any(|r| r[0] == "noon-envelope"));
    assert!(rows
        .iter()
        .filter(|r| r[0] == "qooq:N=8")
        .all(|r| r[1].parse::<f64>().unwrap() >= 1.0));
}

#[test]
fn infeasible_points_become_error_rows() {
    let o = run(&["fig1", "--state", "qooq:N=8", "--nav", "0.5,2"]);
    assert_eq!(o.status.code(), Some(2));
    let rows = records(&stdout(&o));
    assert!(rows[1].join(",").contains("infeasible"));
    assert!((rows[2][2].parse::<f64>().unwrap() - 10.0).abs() < 1e-9);
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&["fig1", "--bogus"]).status.code(), Some(2));
    let o = run(&["qfi", "--state", "cat:N=2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = Command::new(env!("CARGO_BIN_EXE_phasecraft"))
        .args(["qfi"])
        .env("PHASECRAFT_TAIL_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"state": ["noon:N=3"], "T": [0.5], "phi": [0.25]}"#).unwrap();
    let out = dir.path().join("fi.csv");
    let o = run(&[
        "fi",
        "--config",
        cfg.to_str().unwrap(),
        "--T",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let rows = records(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows[0], ["phi", "fi", "inv_fi", "snl", "label", "T", "n_av", "error"]);
    assert_eq!(rows[1][0], "0.25");
    assert_eq!(rows[1][5], "1");
    assert!((rows[1][1].parse::<f64>().unwrap() - 9.0).abs() < 1e-9);
}

#[test]
fn custom_probe_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let amps = dir.path().join("amps.json");
    std::fs::write(&amps, "[[0, 0], [0.6, 0], [0, 0.8]]").unwrap();
    let spec = format!("custom:file={}", amps.display());
    let o = run(&["qfi", "--state", &spec, "--format", "json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec = &doc["records"][0];
    assert!((rec["f_q"].as_f64().unwrap() - (0.36 + 4.0 * 0.64)).abs() < 1e-12);
    assert_eq!(doc["metadata"]["command"], "qfi");
}

#[test]
fn parity_grid_and_tokens() {
    let o = run(&["fig3", "--state", "noon:N=2", "--phi-grid", "0:2pi:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# snl_beating_range noon: "));
    let rows = records(&text);
    assert_eq!(rows.len(), 1 + 2 * 5);
    assert!(rows.iter().any(|r| r[3] == "snl"));
}

#[test]
fn generate_reports() {
    let o = run(&["generate", "--scheme", "qooq", "--N", "3", "--alpha", "0.5"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["output_support"], serde_json::json!([1, 4]));
    assert!(doc["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    assert_eq!(
        run(&["generate", "--scheme", "qooq", "--alpha", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["generate"]).status.code(), Some(1));
    let o = run(&["generate", "--scheme", "decomposable", "--gates", "squeeze:0.3:pi"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["fidelity"].as_f64().unwrap() > 1.0 - 1e-6);
}

#[test]
fn seeds_change_samples() {
    let a = stdout(&run(&["sample", "--count", "5", "--seed", "1"]));
    let b = stdout(&run(&["sample", "--count", "5", "--seed", "2"]));
    let c = stdout(&run(&["sample", "--count", "5", "--seed", "1", "--jobs", "1"]));
    assert_ne!(records(&a), records(&b));
    assert_eq!(a, c);
    assert_eq!(records(&a)[0], ["id", "n_av", "inv_fi", "weights_digest"]);
}

#[test]
fn optimal_n_table() {
    let o = run(&["fig4", "--T", "0.9", "--nav", "2"]);
    assert!(o.status.success());
    let rows = records(&stdout(&o));
    assert_eq!(rows[1][2], "9");
}
