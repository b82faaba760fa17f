#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::{json, Value};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn paper_request_bytes() -> Vec<u8> {
    std::fs::read(repo_root().join("requests/paper_trials.json")).unwrap()
}

pub fn counts_trial(name: &str, c: (u64, u64), t: (u64, u64)) -> Value {
    json!({
        "name": name,
        "counts": {
            "control": { "label": "C", "n": c.1, "successes": c.0 },
            "treatment": { "label": "T", "n": t.1, "successes": t.0 }
        }
    })
}

pub fn four_trials() -> Value {
    let trials: Vec<Value> = (0..4)
        .map(|i| counts_trial(&format!("trial{i}"), (40, 100), (45, 100)))
        .collect();
    json!({ "mode": "freq", "trials": trials })
}
