use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use qrewrite::syntax::SourceSpan;
use qrewrite::{NormalizeError, ReplayError, RewriteError, SessionError, SyntaxError};

/// JSON error payload. `error` names the underlying error type.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    /// Zero-based index of the failing derivation step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_index: Option<usize>,
    /// Current move-list version, sent with stale-move rejections.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, error, message: message.into(), span: None, step_index: None, version: None }
    }

    pub fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "SessionNotFound", format!("no session {id}"))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<SyntaxError> for ApiError {
    fn from(e: SyntaxError) -> Self {
        let kind = if e.is_sort_error() { "SortError" } else { "ParseError" };
        ApiError { span: Some(e.span()), ..ApiError::new(StatusCode::BAD_REQUEST, kind, e.to_string()) }
    }
}

impl From<RewriteError> for ApiError {
    fn from(e: RewriteError) -> Self {
        let kind = match e {
            RewriteError::UnknownRule(_) => "UnknownRule",
            RewriteError::InvalidPosition(_) => "InvalidPosition",
            RewriteError::NoMatch { .. } => "NoMatch",
            RewriteError::DirectionNotAllowed { .. } => "DirectionNotAllowed",
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, kind, e.to_string())
    }
}

impl From<NormalizeError> for ApiError {
    fn from(e: NormalizeError) -> Self {
        let kind = match e {
            NormalizeError::StepLimitExceeded { .. } => "StepLimitExceeded",
            NormalizeError::UnknownOptional(_) => "UnknownOptional",
            _ => "NormalizeError",
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, kind, e.to_string())
    }
}

impl From<ReplayError> for ApiError {
    fn from(e: ReplayError) -> Self {
        ApiError {
            step_index: Some(e.index),
            ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ReplayError", e.to_string())
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Stale { current, .. } => ApiError {
                version: Some(current),
                ..ApiError::new(StatusCode::CONFLICT, "StaleMoves", e.to_string())
            },
            SessionError::MoveOutOfRange { .. } => ApiError::new(StatusCode::CONFLICT, "MoveOutOfRange", e.to_string()),
            SessionError::NothingToUndo => ApiError::new(StatusCode::CONFLICT, "NothingToUndo", e.to_string()),
            SessionError::Rewrite(e) => e.into(),
            SessionError::Normalize(e) => e.into(),
        }
    }
}
