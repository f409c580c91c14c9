use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    Unprocessable(String),
    /// Upload limit in bytes.
    PayloadTooLarge(usize),
    Internal(String),
}

impl ApiError {
    pub(crate) fn internal(e: impl std::fmt::Display) -> Self {
        ApiError::Internal(e.to_string())
    }
}

impl From<faircrop_core::Error> for ApiError {
    fn from(e: faircrop_core::Error) -> Self {
        use faircrop_core::Error as E;
        match e {
            E::UnknownImage(id) => ApiError::NotFound(format!("no image {id:?}")),
            E::UnsupportedFormat(_) | E::CorruptImage { .. } | E::InvalidImage(_) => {
                ApiError::BadRequest(e.to_string())
            }
            E::InvalidParameter(_) | E::DegenerateCrop { .. } => ApiError::BadRequest(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
            ApiError::PayloadTooLarge(limit) => (
                StatusCode::PAYLOAD_TOO_LARGE,
                format!("upload exceeds the {limit}-byte limit"),
            ),
            ApiError::Internal(m) => {
                tracing::error!("{m}");
                (StatusCode::INTERNAL_SERVER_ERROR, m)
            }
        };
        (status, Json(json!({ "error": message }))).into_response()
    }
}
