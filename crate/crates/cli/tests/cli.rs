mod common;

use std::process::Command;

use accept_cli::service::{router, ServiceConfig};
use axum::body::{to_bytes, Body};
use axum::http::Request;
use common::*;
use serde_json::Value;
use tower::ServiceExt;

fn accept() -> Command {
    Command::new(env!("CARGO_BIN_EXE_accept"))
}

#[test]
fn analyze_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let input = repo_root().join("requests/paper_trials.json");
    let out = accept()
        .args(["analyze", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut want = vec!["bundle.json".to_string(), "figure_bayes.svg".into(), "figure_freq.svg".into()];
    for trial in ["EARNEST", "SECOND-LINE"] {
        for mode in ["bayes", "freq"] {
            for ext in ["csv", "json", "md", "svg"] {
                want.push(format!("{trial}_{mode}_curve.{ext}"));
            }
        }
    }
    want.sort();
    assert_eq!(names, want);

    let csv = std::fs::read_to_string(dir.path().join("EARNEST_freq_curve.csv")).unwrap();
    assert!(csv.starts_with("acceptability_threshold,probability,formatted\r\n"));
    assert!(csv.contains("\r\n0,0.892925,89%\r\n"));
}

#[test]
fn emit_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let input = repo_root().join("requests/paper_trials.json");
    let out = accept()
        .args(["analyze", "--mode", "freq", "--emit", "csv", "--seed", "7", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["EARNEST_freq_curve.csv", "SECOND-LINE_freq_curve.csv", "bundle.json"]);
    let bundle: Value = serde_json::from_slice(&std::fs::read(dir.path().join("bundle.json")).unwrap()).unwrap();
    assert_eq!(bundle["metadata"]["seed"], 7);
    assert_eq!(bundle["metadata"]["request"]["mode"], "freq");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let four = dir.path().join("four.json");
    std::fs::write(&four, four_trials().to_string()).unwrap();
    let out = accept().args(["analyze", "--out"]).arg(dir.path()).arg("--input").arg(&four).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too_many_trials"));

    let missing = dir.path().join("missing.json");
    let out = accept().args(["analyze", "--input"]).arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let slow = dir.path().join("slow.json");
    let req = serde_json::json!({
        "mode": "bayes",
        "sampler": { "warmup_iterations": 1, "kept_iterations_per_chain": 8, "thin": 1, "rhat_limit": 1.0 },
        "trials": [counts_trial("x", (255, 426), (277, 433))]
    });
    std::fs::write(&slow, req.to_string()).unwrap();
    let out = accept().args(["analyze", "--out"]).arg(dir.path()).arg("--input").arg(&slow).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = accept().args(["prior-summary", "--control-rate", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = accept().args(["analyze", "--mode", "sideways", "--input", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prior_summary_and_version() {
    let out = accept()
        .args(["prior-summary", "--control-rate", "0.75", "--draws", "20000", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_draws"], 20000);
    let median = v["control_rate"]["median"].as_f64().unwrap();
    assert!((median - 75.0).abs() < 1.5, "{median}");

    let out = accept().arg("version").output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("accept {}", env!("CARGO_PKG_VERSION")));
}

#[tokio::test]
async fn cli_and_http_bundles_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = repo_root().join("requests/paper_trials.json");
    let out = accept()
        .args(["analyze", "--emit", "json", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let from_cli = std::fs::read(dir.path().join("bundle.json")).unwrap();

    let req = Request::post("/api/v1/analyze").body(Body::from(paper_request_bytes())).unwrap();
    let resp = router(ServiceConfig::default()).oneshot(req).await.unwrap();
    let from_http = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    assert!(from_cli == from_http.to_vec(), "CLI and HTTP bundles differ");
}
