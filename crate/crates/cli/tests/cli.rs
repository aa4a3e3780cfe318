use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zetageo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// The `exact` column of every data row.
fn exact_column(csv: &str) -> Vec<String> {
    csv.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().to_string()).collect()
}

#[test]
fn zeta_of_p1_over_f2() {
    let o = run(&["zeta", "--builtin", "P1", "--p", "2", "--trunc", "6"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("command,quantity,index,value_re,value_im,exact,tail_bound,params\n"));
    assert_eq!(exact_column(&out), ["1", "3", "7", "15", "31", "63", "127"]);
}

#[test]
fn red_count_example() {
    let o = run(&["red", "--n", "2", "--m", "4"]);
    assert!(o.status.success());
    assert_eq!(exact_column(&stdout(&o)), ["7"]);
}

#[test]
fn entropy_of_spec_f2_as_document() {
    let o = run(&["entropy", "--builtin", "spec", "--p", "2", "--s", "1", "--format", "doc"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let v = doc["records"][0]["value_re"].as_f64().unwrap();
    assert!((v - 1.3862944).abs() < 1e-6);
    assert_eq!(doc["params"]["p"], "2");
    assert_eq!(doc["params"]["s"], "1");
}

#[test]
fn every_row_carries_parameters() {
    for args in [
        &["fisher", "--family", "categorical-3", "--gamma", "0.2,0.5"][..],
        &["clifford", "--p", "2", "--q", "1"],
        &["quad", "--op", "dual", "--a", "one"],
        &["channel", "--builtin", "depolarizing", "--d", "3", "--lambda", "0.2"],
    ] {
        let o = run(args);
        assert!(o.status.success(), "{args:?}");
        for line in stdout(&o).lines().skip(1) {
            let params = line.rsplit(',').next().unwrap();
            assert!(params.contains('='), "{args:?}: {line}");
        }
    }
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["zeta", "--builtin", "Q7", "--p", "2"][..],
        &["zeta", "--builtin", "P1", "--p", "4"],
        &["zeta", "--builtin", "P1"],
        &["entropy", "--builtin", "A1", "--p", "2", "--s", "0.5"],
        &["fisher", "--family", "bernoulli", "--gamma", "0.2,0.3"],
        &["cone", "--kind", "orthant", "--n", "2", "--x", "1,-1"],
        &["quad", "--op", "black", "--a", "k"],
        &["no-such-command"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn budget_errors_exit_3() {
    let spec = tmp("cusp.json", r#"{"p": 3, "kind": "affine", "ambient_dim": 2, "equations": ["x2^2 - x1^3 - 1"]}"#);
    let o = bin()
        .args(["zeta", "--spec", spec.to_str().unwrap(), "--trunc", "4"])
        .env("ZETAGEO_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ZETAGEO_BUDGET"));
}

#[test]
fn spec_documents_and_overrides() {
    let spec = tmp("line.json", r#"{"p": 2, "kind": "affine", "ambient_dim": 2, "equations": ["x1 + x2"], "potential": "x1"}"#);
    let path = spec.to_str().unwrap();
    // A line has q^n points of degree n.
    let o = run(&["zeta", "--spec", path, "--trunc", "3"]);
    assert_eq!(exact_column(&stdout(&o)), ["1", "2", "4", "8"]);
    let o = run(&["zeta", "--spec", path, "--p", "3", "--trunc", "2"]);
    assert_eq!(exact_column(&stdout(&o)), ["1", "3", "9"]);
    let bad = tmp("bad.json", r#"{"p": 2, "kind": "affine", "ambient_dim": 2, "equations": ["x1 +* x2"]}"#);
    assert_eq!(run(&["zeta", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
    let unknown = tmp("unknown.json", r#"{"p": 2, "kind": "affine", "dims": 2}"#);
    assert_eq!(run(&["zeta", "--spec", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["cone", "--kind", "lorentz", "--n", "2", "--x", "2,0.5", "--samples", "4096", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["cat-check", "--weights-in", "0.5,0.5", "--weights-out", "0.2,0.8", "--quantum-dim", "2", "--trials", "10", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn channel_documents() {
    // The swap of a qubit pair written as a channel matrix is the transpose map.
    let mut rows = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let row: Vec<String> = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| if (a, b) == (j, i) { "[1,0]".to_string() } else { "[0,0]".to_string() })
                .collect();
            rows.push(format!("[{}]", row.join(",")));
        }
    }
    let doc = format!(r#"{{"d_in": 2, "d_out": 2, "matrix": [{}], "state": [[[0.25,0],[0.1,0.2]],[[0.1,-0.2],[0.75,0]]]}}"#, rows.join(","));
    let path = tmp("transpose.json", &doc);
    let o = run(&["channel", "--input", path.to_str().unwrap(), "--format", "doc"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let recs = v["records"].as_array().unwrap();
    let get = |q: &str, idx: &str| recs.iter().find(|r| r["quantity"] == q && r["index"] == idx).unwrap().clone();
    assert_eq!(get("cp", "")["exact"], "false");
    assert_eq!(get("tp", "")["exact"], "true");
    assert!((get("choi_eigenvalue", "0")["value_re"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    // Transposing moves the (1,0) entry to (0,1).
    let im = get("image", "0,1");
    assert_eq!((im["value_re"].as_f64().unwrap(), im["value_im"].as_f64().unwrap()), (0.1, -0.2));
}

#[test]
fn quadratic_documents() {
    let a = tmp("quad_a.json", r#"{"generators": 2, "relations": [[1, "-1/2", 0, 3]]}"#);
    let o = run(&["quad", "--op", "check", "--a", a.to_str().unwrap(), "--b", "k"]);
    assert!(o.status.success());
    assert_eq!(exact_column(&stdout(&o)), ["true"]);
    let o = run(&["quad", "--op", "dual", "--a", a.to_str().unwrap()]);
    // The complement of one relation in a 4-dimensional space has 3 rows.
    let rows = stdout(&o).lines().filter(|l| l.contains(",relations,")).count();
    assert_eq!(rows, 12);
}

#[test]
fn output_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("red.csv");
    let o = run(&["red", "--n", "2", "--m", "2", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(exact_column(&std::fs::read_to_string(&path).unwrap()), ["3"]);
}
