//! JSON HTTP service.
//!
//! | Route | Result |
//! |---|---|
//! | `POST /api/v1/analyze[?svg=true]` | canonical bundle JSON |
//! | `GET /api/v1/health` | `{"status":"ok"}` |
//! | `GET /api/v1/version` | software name and version |
//!
//! Errors are `{code, message, field_path}` with status 400 (validation),
//! 413 (too many trials or body too large), 422 (not converged) or 503
//! (timeout).

use std::collections::HashMap;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::{analyze_json, Failure};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_MAX_BODY_BYTES: usize = 64 * 1024;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub host: IpAddr,
    pub port: u16,
    pub max_body_bytes: usize,
    pub timeout: Duration,
    /// Directory of static assets served for unmatched paths.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            max_body_bytes: DEFAULT_MAX_BODY_BYTES,
            timeout: DEFAULT_TIMEOUT,
            static_dir: None,
        }
    }
}

impl ServiceConfig {
    /// Read `ACCEPT_HOST`, `ACCEPT_PORT`, `ACCEPT_MAX_BODY_BYTES`,
    /// `ACCEPT_TIMEOUT_SECS` and `ACCEPT_STATIC_DIR`; unset variables keep
    /// their defaults.
    pub fn from_env() -> Result<Self, Failure> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, Failure> {
        fn parse<T: std::str::FromStr>(key: &str, v: String) -> Result<T, Failure> {
            v.trim()
                .parse()
                .map_err(|_| Failure::new("invalid_config", format!("{key}={v:?} is not valid")).at(key))
        }
        let mut cfg = ServiceConfig::default();
        if let Some(v) = get("ACCEPT_HOST") {
            cfg.host = parse("ACCEPT_HOST", v)?;
        }
        if let Some(v) = get("ACCEPT_PORT") {
            cfg.port = parse("ACCEPT_PORT", v)?;
        }
        if let Some(v) = get("ACCEPT_MAX_BODY_BYTES") {
            cfg.max_body_bytes = parse("ACCEPT_MAX_BODY_BYTES", v)?;
        }
        if let Some(v) = get("ACCEPT_TIMEOUT_SECS") {
            let secs: f64 = parse("ACCEPT_TIMEOUT_SECS", v.clone())?;
            if !(secs.is_finite() && secs > 0.0) {
                return Err(Failure::new("invalid_config", format!("ACCEPT_TIMEOUT_SECS={v:?} must be positive"))
                    .at("ACCEPT_TIMEOUT_SECS"));
            }
            cfg.timeout = Duration::from_secs_f64(secs);
        }
        cfg.static_dir = get("ACCEPT_STATIC_DIR").filter(|s| !s.is_empty()).map(PathBuf::from);
        Ok(cfg)
    }

    pub fn addr(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.port)
    }
}

type Shared = Arc<ServiceConfig>;

fn failure_response(f: &Failure) -> Response {
    let status = StatusCode::from_u16(f.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(f.to_json())).into_response()
}

fn svg_flag(query: Result<Query<HashMap<String, String>>, QueryRejection>) -> Result<bool, Failure> {
    let Query(params) = query.map_err(|e| Failure::new("invalid_request", e.body_text()))?;
    match params.get("svg").map(String::as_str) {
        None | Some("false") | Some("0") => Ok(false),
        Some("true") | Some("1") | Some("") => Ok(true),
        Some(v) => Err(Failure::new("invalid_request", format!("svg must be true or false, got {v:?}")).at("svg")),
    }
}

async fn analyze_handler(
    State(cfg): State<Shared>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let with_svg = match svg_flag(query) {
        Ok(b) => b,
        Err(f) => return failure_response(&f),
    };
    let body = match body {
        Ok(b) => b,
        Err(e) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => {
            return failure_response(&Failure::new(
                "payload_too_large",
                format!("request body exceeds {} bytes", cfg.max_body_bytes),
            ))
        }
        Err(e) => return failure_response(&Failure::new("bad_body", e.body_text())),
    };
    let work = tokio::task::spawn_blocking(move || analyze_json(&body, with_svg));
    match tokio::time::timeout(cfg.timeout, work).await {
        Ok(Ok(Ok(json))) => ([(header::CONTENT_TYPE, "application/json")], json).into_response(),
        Ok(Ok(Err(f))) => failure_response(&f),
        Ok(Err(join)) => failure_response(&Failure::new("internal", join.to_string())),
        Err(_) => failure_response(&Failure::new(
            "timeout",
            format!("analysis exceeded {:.0} s", cfg.timeout.as_secs_f64()),
        )),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn version() -> Json<serde_json::Value> {
    Json(json!({ "software": accept::analysis::SOFTWARE, "version": accept::analysis::VERSION }))
}

async fn not_found() -> Response {
    failure_response(&Failure::new("not_found", "no such route"))
}

pub fn router(cfg: ServiceConfig) -> Router {
    let static_dir = cfg.static_dir.clone();
    let limit = cfg.max_body_bytes;
    let api = Router::new()
        .route("/api/v1/analyze", post(analyze_handler))
        .route("/api/v1/health", get(health))
        .route("/api/v1/version", get(version))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(Arc::new(cfg));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

/// Bind and serve until the process is stopped.
pub async fn serve(cfg: ServiceConfig) -> Result<(), Failure> {
    let addr = cfg.addr();
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Failure::io(&format!("binding {addr}"), e))?;
    eprintln!("accept listening on http://{addr}");
    axum::serve(listener, router(cfg))
        .await
        .map_err(|e| Failure::io("serving", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_config() {
        let cfg = ServiceConfig::from_lookup(|_| None).unwrap();
        assert_eq!(cfg, ServiceConfig::default());
        assert_eq!(cfg.max_body_bytes, 65536);
        assert_eq!(cfg.timeout, Duration::from_secs(60));

        let env = |k: &str| match k {
            "ACCEPT_PORT" => Some("9000".to_string()),
            "ACCEPT_TIMEOUT_SECS" => Some("2.5".to_string()),
            _ => None,
        };
        let cfg = ServiceConfig::from_lookup(env).unwrap();
        assert_eq!((cfg.port, cfg.timeout), (9000, Duration::from_millis(2500)));

        let bad = ServiceConfig::from_lookup(|k| (k == "ACCEPT_PORT").then(|| "http".into()));
        assert_eq!(bad.unwrap_err().field_path.as_deref(), Some("ACCEPT_PORT"));
    }
}
