use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const POWER4: &str = r#"{"kind":"detpower","n":2,"p":4}"#;

fn matleg(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_matleg"));
    cmd.args(args).env_remove("MATLEG_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn dual_prints_the_conjugate_family() {
    let out = matleg(&["dual", "--family", POWER4], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), r#"{"kind":"detpower","n":2,"p":1.3333333333333333}"#);

    let out = matleg(&["dual", "--family", r#"{"kind":"detroot","n":2}"#], &[]);
    assert_eq!(stdout(&out).trim(), r#"{"kind":"zero-on-manifold","n":2}"#);

    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "fam.json", r#"{"kind":"areapower","alpha":2,"beta":0.5}"#);
    let out = matleg(&["dual", "--family", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), r#"{"kind":"areapower","alpha":2.0,"beta":0.5}"#);
}

#[test]
fn eval_and_grad() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.json", r#"{"rows":2,"cols":2,"entries":[[2,0],[0,1]]}"#);
    let x = x.to_str().unwrap();
    let out = matleg(&["eval", "--family", POWER4, "--matrix", x], &[]);
    assert_eq!(out.status.code(), Some(0));
    // (2/4) * 2^2
    assert_eq!(stdout(&out).trim().parse::<f64>().unwrap(), 2.0);

    let out = matleg(&["grad", "--family", POWER4, "--matrix", x], &[]);
    assert_eq!(out.status.code(), Some(0));
    let grad: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // det^(p/N) x^-T = 4 diag(1/2, 1)
    assert_eq!(grad["entries"], serde_json::json!([[2.0, 0.0], [0.0, 4.0]]));
}

#[test]
fn malformed_input_exits_2_with_empty_stdout() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"rows":2,"cols":2,"entries":[[1,2],[3]]}"#,
        r#"{"rows":2,"cols":2,"entries":[[1,0],[0,1]],"extra":1}"#,
        "not json",
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("bad{i}.json"), text);
        let out = matleg(&["eval", "--family", POWER4, "--matrix", path.to_str().unwrap()], &[]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(out.stdout.is_empty());
        let err = stderr(&out);
        assert!(err.starts_with("matleg: ") && err.lines().count() == 1, "{err}");
    }
    let missing = dir.path().join("missing.json");
    let out = matleg(&["eval", "--family", POWER4, "--matrix", missing.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = matleg(&["frobnicate"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = matleg(&["dual", "--family", r#"{"kind":"detpower","n":2,"p":1}"#], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let singular = write(dir.path(), "s.json", r#"{"rows":2,"cols":2,"entries":[[1,2],[2,4]]}"#);
    let out = matleg(&["grad", "--family", POWER4, "--matrix", singular.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());

    let negative_sums = write(dir.path(), "n.json", r#"{"rows":3,"cols":3,"entries":[[-1,0,0],[0,1,0],[0,0,1]]}"#);
    let fam = r#"{"kind":"sumpower","alpha":3,"beta":0.5}"#;
    let out = matleg(&["eval", "--family", fam, "--matrix", negative_sums.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn verify_writes_a_deterministic_report() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let report = report.to_str().unwrap();
    let args = ["verify", "--family", POWER4, "--seed", "42", "--samples", "200", "--report", report];

    let out = matleg(&args, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let first = std::fs::read(report).unwrap();
    let value: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(value["overall"], true);
    assert_eq!(value["config"]["count"], 200);

    for threads in ["1", "3"] {
        let out = matleg(&args, &[("MATLEG_THREADS", threads)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(std::fs::read(report).unwrap(), first, "threads={threads}");
    }
}

#[test]
fn verify_failures_and_bad_settings() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let report = report.to_str().unwrap();
    let base = ["verify", "--family", POWER4, "--samples", "20", "--report", report];

    let tight = [&base[..], &["--tolerances", r#"{"roundtrip":1e-30}"#]].concat();
    let out = matleg(&tight, &[]);
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(value["overall"], false);

    let out = matleg(&base, &[("MATLEG_THREADS", "0")]);
    assert_eq!(out.status.code(), Some(2));
    let out = matleg(&base, &[("MATLEG_THREADS", "many")]);
    assert_eq!(out.status.code(), Some(2));

    let window = [&base[..], &["--window", "2", "1"]].concat();
    assert_eq!(matleg(&window, &[]).status.code(), Some(2));
    let samples = ["verify", "--family", POWER4, "--samples", "0", "--report", report];
    assert_eq!(matleg(&samples, &[]).status.code(), Some(2));
}

#[test]
fn solve_writes_a_result() {
    let dir = TempDir::new().unwrap();
    let output = dir.path().join("result.json");
    for (p, path) in [(1.5, "primal"), (4.0, "dual")] {
        let problem = write(
            dir.path(),
            "problem.json",
            &format!(r#"{{"n":2,"p":{p},"A":{{"kind":"scaled","a":1}},"f":{{"rows":2,"cols":2,"entries":[[0.1,0],[0,0.1]]}}}}"#),
        );
        let args = ["solve", "--problem", problem.to_str().unwrap(), "--output", output.to_str().unwrap()];
        let out = matleg(&args, &[]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let bytes = std::fs::read(&output).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(value["path"], path);
        assert_eq!(value["success"], true);
        assert_eq!(value["x_star"]["rows"], 2);
        assert_eq!(value["nonminimality_witness"].is_object(), path == "dual");

        assert_eq!(matleg(&args, &[]).status.code(), Some(0));
        assert_eq!(std::fs::read(&output).unwrap(), bytes);
    }

    let problem = write(
        dir.path(),
        "slow.json",
        r#"{"n":2,"p":1.5,"A":{"kind":"scaled","a":1},"f":{"rows":2,"cols":2,"entries":[[0.1,0],[0,0.1]]}}"#,
    );
    let args = [
        "solve",
        "--problem",
        problem.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--options",
        r#"{"max_iter":1,"newton":false}"#,
    ];
    assert_eq!(matleg(&args, &[]).status.code(), Some(1));
}

#[test]
fn in_process_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = matleg::cli::run(&["matleg", "dual", "--family", POWER4], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    assert_eq!(String::from_utf8(out).unwrap().trim(), r#"{"kind":"detpower","n":2,"p":1.3333333333333333}"#);
}
