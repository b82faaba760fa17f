//! Command-line and HTTP front ends for the `accept` library.
//!
//! Both front ends parse requests with [`parse_request`] and run them with
//! [`analyze`], so identical inputs give byte-identical bundles.

pub mod output;
pub mod service;

use std::fmt;

use accept::{run_analyze, AnalysisBundle, AnalysisError, AnalysisRequest};
use serde_json::{json, Value};

/// A machine-readable failure shared by the CLI and the service.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub field_path: Option<String>,
}

impl Failure {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            message: message.into(),
            field_path: None,
        }
    }

    pub fn at(mut self, path: impl Into<String>) -> Self {
        self.field_path = Some(path.into());
        self
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Failure::new("io_error", format!("{context}: {err}"))
    }

    /// Process exit status: 2 validation, 3 convergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self.code.as_str() {
            "not_converged" => 3,
            "io_error" => 4,
            _ => 2,
        }
    }

    /// HTTP status for the service.
    pub fn http_status(&self) -> u16 {
        match self.code.as_str() {
            "too_many_trials" | "payload_too_large" => 413,
            "not_converged" => 422,
            "timeout" => 503,
            "not_found" => 404,
            "internal" | "io_error" => 500,
            _ => 400,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "code": self.code,
            "message": self.message,
            "field_path": self.field_path,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)?;
        if let Some(p) = &self.field_path {
            write!(f, " (at {p})")?;
        }
        Ok(())
    }
}

impl std::error::Error for Failure {}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure {
            code: e.code().into(),
            message: e.error.to_string(),
            field_path: e.field_path,
        }
    }
}

impl From<accept::Error> for Failure {
    fn from(e: accept::Error) -> Self {
        Failure::new(e.code(), e.to_string())
    }
}

/// Parse an [`AnalysisRequest`] from JSON.
///
/// Syntax errors give `bad_json`; well-formed JSON that does not fit the
/// schema gives `invalid_request` with the offending field path.
pub fn parse_request(bytes: &[u8]) -> Result<AnalysisRequest, Failure> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let parsed: Result<AnalysisRequest, _> = serde_path_to_error::deserialize(&mut de);
    let req = match parsed {
        Ok(r) => r,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_data() {
                let f = Failure::new("invalid_request", inner.to_string());
                return Err(if path == "." { f } else { f.at(path) });
            }
            return Err(Failure::new("bad_json", inner.to_string()));
        }
    };
    de.end().map_err(|e| Failure::new("bad_json", e.to_string()))?;
    Ok(req)
}

/// Run an analysis, optionally attaching faceted SVG figures.
pub fn analyze(req: &AnalysisRequest, with_svg: bool) -> Result<AnalysisBundle, Failure> {
    let bundle = run_analyze(req)?;
    if with_svg {
        Ok(bundle.with_figures()?)
    } else {
        Ok(bundle)
    }
}

/// Parse, run and serialize in one step, as the service does.
pub fn analyze_json(bytes: &[u8], with_svg: bool) -> Result<String, Failure> {
    let req = parse_request(bytes)?;
    Ok(analyze(&req, with_svg)?.to_canonical_json())
}
