use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use roboto_core::catalog::CatalogError;
use roboto_core::engine::EngineError;
use roboto_core::syntax::{Diagnostic, SourceLocation};

/// Error body: `{code, message, location?, diagnostics?}`.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<SourceLocation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<DiagnosticBody>,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticBody {
    pub severity: &'static str,
    pub code: &'static str,
    pub message: String,
    pub location: SourceLocation,
}

impl From<&Diagnostic> for DiagnosticBody {
    fn from(d: &Diagnostic) -> Self {
        Self {
            severity: if d.is_error() { "error" } else { "warning" },
            code: d.code.as_str(),
            message: d.message.clone(),
            location: d.location.clone(),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                location: None,
                diagnostics: Vec::new(),
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", format!("no {what} `{id}`"))
    }

    pub fn stale(expected: u64, actual: u64) -> Self {
        Self::new(
            StatusCode::CONFLICT,
            "StaleOrdinal",
            format!("expected ordinal {expected} but the session is at {actual}"),
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
    }

    pub fn engine(err: EngineError, location: Option<SourceLocation>) -> Self {
        let mut e = Self::new(StatusCode::BAD_REQUEST, err.code(), err.to_string());
        e.body.location = location;
        if let EngineError::ValidationFailed(diags) = &err {
            e.body.diagnostics = diags.iter().map(Into::into).collect();
        }
        e
    }

    fn with_diagnostics(mut self, diags: &[Diagnostic]) -> Self {
        self.body.location = diags.iter().find(|d| d.is_error()).map(|d| d.location.clone());
        self.body.diagnostics = diags.iter().map(Into::into).collect();
        self
    }
}

impl From<CatalogError> for ApiError {
    fn from(err: CatalogError) -> Self {
        let status = match &err {
            CatalogError::NotFound(_) => StatusCode::NOT_FOUND,
            CatalogError::ParseFailed(_) | CatalogError::ValidationFailed(_) => StatusCode::BAD_REQUEST,
            CatalogError::ReadOnly(_) => StatusCode::FORBIDDEN,
            CatalogError::CorruptIndex(_) | CatalogError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, err.code(), err.to_string()).with_diagnostics(err.diagnostics())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
