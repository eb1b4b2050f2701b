use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn curvfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvfun"))
        .args(args)
        .env("CURVFUN_THREADS", "2")
        .output()
        .unwrap()
}

fn corpus() -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = curvfun(&["corpus-gen", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn body(dir: &Path, id: &str) -> String {
    dir.join(format!("{id}.json")).to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn eval_reports_the_ball_value() {
    let dir = corpus();
    let out = curvfun(&["eval", "--body", &body(dir.path(), "ball3"), "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = record["value"].as_f64().unwrap();
    assert!((value - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(record["body"], "ball3");
}

#[test]
fn invalid_input_exits_with_usage_code() {
    let dir = corpus();
    let ball = body(dir.path(), "ball3");
    let excluded = curvfun(&["eval", "--body", &ball, "--p", "-3"]);
    assert_eq!(excluded.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&excluded.stderr).contains("excluded"));
    let bad_index = curvfun(&["eval", "--body", &ball, "--p", "1", "--m", "2", "--i", "1,0"]);
    assert_eq!(bad_index.status.code(), Some(2));
    let no_seed = curvfun(&["mc-polytope", "--body", &body(dir.path(), "ball2"), "--N", "10,20"]);
    assert_eq!(no_seed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&no_seed.stderr).contains("--seed"));
    let missing = curvfun(&["eval", "--body", "/nonexistent/body.json", "--p", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn single_claim_exits_cleanly() {
    let dir = corpus();
    let out = curvfun(&[
        "verify",
        "holder3",
        "--body",
        &body(dir.path(), "perturbed_circle_005"),
        "--r",
        "4",
        "--s",
        "1",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_ne!(record["verdict"], "violated");
}

#[test]
fn full_suite_flags_only_the_volume_normalized_monotone_form() {
    let dir = corpus();
    let out = curvfun(&["verify", "all", "--corpus", dir.path().to_str().unwrap(), "--summary", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let violated = headers.iter().position(|h| h == "violated").unwrap();
    for row in rows.records() {
        let row = row.unwrap();
        let count: usize = row[violated].parse().unwrap();
        if &row[0] == "monotone_volume_normalized" {
            assert!(count > 0);
        } else {
            assert_eq!(count, 0, "{}", &row[0]);
        }
    }
}

#[test]
fn output_is_reproducible() {
    let dir = corpus();
    let again = corpus();
    for id in ["ball2", "ellipse_3_1", "perturbed_sphere_010"] {
        assert_eq!(
            std::fs::read(body(dir.path(), id)).unwrap(),
            std::fs::read(body(again.path(), id)).unwrap()
        );
    }
    let ellipse = body(dir.path(), "ellipse_2_1");
    let sweep = ["sweep", "--body", ellipse.as_str(), "--p-grid", "0.5:8:5:log", "--format", "csv"];
    assert_eq!(stdout(&curvfun(&sweep)), stdout(&curvfun(&sweep)));
    let mc = [
        "mc-polytope",
        "--body",
        ellipse.as_str(),
        "--N",
        "20,40",
        "--trials",
        "50",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    let first = curvfun(&mc);
    let second = curvfun(&mc);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn divergence_and_output_file() {
    let dir = corpus();
    let target = dir.path().join("kl.json");
    let out = curvfun(&[
        "divergence",
        "--body",
        &body(dir.path(), "ellipse_2_1"),
        "--gen",
        "kl",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&target).unwrap();
    let record: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let value = record["value"].as_f64().unwrap();
    assert!((value + 2.0 * std::f64::consts::PI * 2f64.ln()).abs() < 1e-9, "{text}");
}
