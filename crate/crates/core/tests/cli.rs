use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qteich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qteich"))
        .args(args)
        .env_remove("QTEICH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn surface_then_moves() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("torus.json");
    let out = qteich(&[
        "surface",
        "--genus",
        "1",
        "--punctures",
        "1",
        "--out",
        tri.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let t: Value = serde_json::from_str(&fs::read_to_string(&tri).unwrap()).unwrap();
    assert_eq!(t["triangles"].as_array().unwrap().len(), 2);
    assert_eq!(t["gluing"].as_array().unwrap().len(), 3);

    // flip and flip back, with rotations and relabeling: the point comes back
    let d = qteich::DecoratedTriangulation::new_surface(1, 1).unwrap();
    let w = qteich::triangulation::double_flip_word(&d, 0).unwrap();
    let word = dir.path().join("word.json");
    fs::write(&word, serde_json::to_string(&w).unwrap()).unwrap();
    let point = dir.path().join("point.json");
    fs::write(
        &point,
        r#"{"penner":{"0":"2","1":"3","2":"5/7"},"triangle":{"0":["1","2"],"1":["3/4","5"]}}"#,
    )
    .unwrap();
    let out = qteich(&[
        "moves",
        "--triangulation",
        tri.to_str().unwrap(),
        "--word",
        word.to_str().unwrap(),
        "--point",
        point.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["penner"]["0"], "2");
    assert_eq!(v["penner"]["2"], "5/7");
    assert_eq!(v["triangle"]["1"][0], "3/4");
    assert_eq!(v["triangulation"], t);
}

#[test]
fn moves_report_bad_words() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("s.json");
    assert!(qteich(&[
        "surface",
        "-g",
        "0",
        "-p",
        "4",
        "--out",
        tri.to_str().unwrap()
    ])
    .status
    .success());
    let word = dir.path().join("w.json");
    fs::write(&word, r#"[{"op":"flip","edge":42}]"#).unwrap();
    let out = qteich(&[
        "moves",
        "--triangulation",
        tri.to_str().unwrap(),
        "--word",
        word.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown edge 42"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = qteich(&["verify", "everything"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid value"));
}

#[test]
fn verify_report_is_byte_stable_and_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qteich"))
            .args([
                "verify",
                "classical",
                "--genus",
                "0",
                "--punctures",
                "4",
                "--seed",
                "3",
            ])
            .env("QTEICH_OUT_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let path = dir.path().join("verify-classical.json");
    let a = fs::read(&path).unwrap();
    assert!(run().status.success());
    assert_eq!(a, fs::read(&path).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["properties"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    let mut unique = names.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), names.len());
}

#[test]
fn torus_classical_suite_reports_the_bracket_failure() {
    let out = qteich(&[
        "verify",
        "classical",
        "--genus",
        "1",
        "--punctures",
        "1",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let failing: Vec<&str> = v["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["verdict"] == "exact-fail")
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["poisson equals intersection (1,1)"]);
}

#[test]
fn qdilog_eval_and_table() {
    let out = qteich(&[
        "qdilog",
        "eval",
        "--hbar",
        "3.141592653589793",
        "--z",
        "0,0",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let re = v["psi"][0].as_f64().unwrap();
    let im = v["psi"][1].as_f64().unwrap();
    let want = std::f64::consts::PI / 12.0;
    assert!((re - want.cos()).abs() < 1e-10 && (im - want.sin()).abs() < 1e-10);

    let out = qteich(&["qdilog", "eval", "--hbar", "1", "--z", "0,9"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qteich(&["qdilog", "verify", "--hbar", "1", "--grid", "-1:1:0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im,abs,residual"));
    assert_eq!(lines.count(), 5);
}
