mod common;

use std::time::Duration;

use accept_cli::service::{router, ServiceConfig};
use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use common::*;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(cfg: ServiceConfig, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = router(cfg).oneshot(req).await.unwrap();
    let status = resp.status();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, body.to_vec())
}

async fn post(uri: &str, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    post_with(ServiceConfig::default(), uri, body).await
}

async fn post_with(cfg: ServiceConfig, uri: &str, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(body.into())
        .unwrap();
    call(cfg, req).await
}

fn error_of(body: &[u8]) -> (String, Option<String>) {
    let v: Value = serde_json::from_slice(body).unwrap();
    assert!(v["message"].is_string());
    (v["code"].as_str().unwrap().to_string(), v["field_path"].as_str().map(String::from))
}

#[tokio::test]
async fn health_and_version() {
    let get = |uri: &str| Request::get(uri).body(Body::empty()).unwrap();
    let (status, body) = call(ServiceConfig::default(), get("/api/v1/health")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap(), json!({"status": "ok"}));

    let (status, body) = call(ServiceConfig::default(), get("/api/v1/version")).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v["software"], "accept");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));

    let (status, body) = call(ServiceConfig::default(), get("/nope")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_of(&body).0, "not_found");
}

#[tokio::test]
async fn two_trial_request() {
    let (status, body) = post("/api/v1/analyze", paper_request_bytes()).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_slice(&body).unwrap();
    let trials = v["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 2);
    for t in trials {
        for mode in ["bayes", "freq"] {
            assert!(t[mode]["curve"]["points"].as_array().unwrap().len() > 100);
        }
    }
    assert!(v.get("svg").is_none());

    let (status, body) = post("/api/v1/analyze?svg=true", paper_request_bytes()).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert!(v["svg"]["freq"].as_str().unwrap().starts_with("<?xml"));
    assert!(v["svg"]["bayes"].as_str().unwrap().contains("curve-bayes"));
}

#[tokio::test]
async fn validation_errors() {
    let (status, body) = post("/api/v1/analyze", "{\"trials\": [").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_of(&body).0, "bad_json");

    let (status, body) = post("/api/v1/analyze", four_trials().to_string()).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(error_of(&body), ("too_many_trials".into(), Some("trials".into())));

    let bad = json!({ "mode": "freq", "trials": [counts_trial("x", (120, 100), (5, 10))] });
    let (status, body) = post("/api/v1/analyze", bad.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (code, path) = error_of(&body);
    assert_eq!(code, "invalid_counts");
    assert_eq!(path.as_deref(), Some("trials[0].counts"));

    let typo = json!({ "mode": "sometimes", "trials": [] });
    let (status, body) = post("/api/v1/analyze", typo.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_of(&body), ("invalid_request".into(), Some("mode".into())));

    let (status, body) = post("/api/v1/analyze?svg=maybe", paper_request_bytes()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_of(&body).1.as_deref(), Some("svg"));
}

#[tokio::test]
async fn convergence_failure_is_422() {
    let req = json!({
        "mode": "bayes",
        "sampler": { "warmup_iterations": 1, "kept_iterations_per_chain": 8, "thin": 1, "rhat_limit": 1.0 },
        "trials": [counts_trial("x", (255, 426), (277, 433))]
    });
    let (status, body) = post("/api/v1/analyze", req.to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_of(&body).0, "not_converged");
}

#[tokio::test]
async fn body_limit_and_timeout() {
    let small = ServiceConfig { max_body_bytes: 64, ..Default::default() };
    let (status, body) = post_with(small, "/api/v1/analyze", paper_request_bytes()).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(error_of(&body).0, "payload_too_large");

    let hasty = ServiceConfig { timeout: Duration::from_nanos(1), ..Default::default() };
    let heavy = json!({
        "mode": "bayes",
        "sampler": { "kept_iterations_per_chain": 20000 },
        "trials": [counts_trial("x", (255, 426), (277, 433))]
    });
    let (status, body) = post_with(hasty, "/api/v1/analyze", heavy.to_string()).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(error_of(&body).0, "timeout");
}

#[tokio::test]
async fn concurrent_requests_are_isolated() {
    let app = router(ServiceConfig::default());
    let mut handles = Vec::new();
    for seed in [1u64, 2, 1, 2] {
        let mut req: Value = serde_json::from_slice(&paper_request_bytes()).unwrap();
        req["seed"] = json!(seed);
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let r = Request::post("/api/v1/analyze").body(Body::from(req.to_string())).unwrap();
            let resp = app.oneshot(r).await.unwrap();
            to_bytes(resp.into_body(), usize::MAX).await.unwrap()
        }));
    }
    let mut out = Vec::new();
    for h in handles {
        out.push(h.await.unwrap());
    }
    assert_eq!(out[0], out[2]);
    assert_eq!(out[1], out[3]);
    assert_ne!(out[0], out[1]);
}
