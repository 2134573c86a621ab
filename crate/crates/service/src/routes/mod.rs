use std::collections::BTreeMap;
use std::str::FromStr;

use axum::extract::DefaultBodyLimit;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::ApiError;
use crate::state::{AppState, Completion};

mod analysis;
mod graphs;
mod workspace;

pub type Params = BTreeMap<String, String>;

pub fn router(state: AppState) -> Router {
    let limit = state.config().max_body_bytes;
    Router::new()
        .route("/health", get(|| async { Json(serde_json::json!({ "status": "ok" })) }))
        .route("/measures", get(analysis::catalog))
        .route("/graphs", get(graphs::list).post(graphs::create))
        .route("/graphs/{id}", get(graphs::fetch).delete(graphs::remove))
        .route("/graphs/{id}/summary", get(analysis::summary))
        .route("/graphs/{id}/measures/{target}/{measure}", get(analysis::measure))
        .route("/graphs/{id}/top/{target}/{measure}", get(analysis::top))
        .route("/graphs/{id}/mutations", post(graphs::mutate))
        .route("/graphs/{id}/insert", post(graphs::insert))
        .route("/graphs/{id}/filter", post(analysis::filter))
        .route("/graphs/{id}/partitions", post(analysis::partitions))
        .route("/graphs/{id}/distributions/{measure}", get(analysis::distribution))
        .route("/graphs/{id}/search", get(graphs::search))
        .route("/graphs/{id}/sample", post(graphs::sample))
        .route("/graphs/{id}/window", get(graphs::window))
        .route("/graphs/{id}/timeline", get(graphs::timeline))
        .route("/graphs/{id}/layout", get(graphs::get_layout).put(graphs::put_layout))
        .route("/graphs/{id}/export", get(graphs::export))
        .route("/graphs/{id}/events", get(graphs::events))
        .route("/jobs/{id}", get(analysis::job))
        .route("/workspace", get(workspace::save).put(workspace::load))
        .route("/workspace/save", post(workspace::persist))
        .route("/workspace/settings", put(workspace::put_settings).get(workspace::get_settings))
        .route("/workspace/views", put(workspace::put_views).get(workspace::get_views))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint") })
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

/// Optional query parameter parsed with `FromStr`.
pub fn param<T: FromStr>(q: &Params, key: &str) -> Result<Option<T>, ApiError>
where
    T::Err: std::fmt::Display,
{
    q.get(key)
        .map(|s| s.parse::<T>().map_err(|e| ApiError::bad_request("bad-query", format!("query parameter '{key}': {e}"))))
        .transpose()
}

pub fn required<T: FromStr>(q: &Params, key: &str) -> Result<T, ApiError>
where
    T::Err: std::fmt::Display,
{
    param(q, key)?.ok_or_else(|| ApiError::bad_request("bad-query", format!("query parameter '{key}' is required")))
}

/// Malformed JSON is a 400; well-formed JSON of the wrong shape gets `shape`.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8], shape: impl Fn(String) -> ApiError) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::bad_request("empty-body", "request body is empty"));
    }
    serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => shape(e.to_string()),
        _ => ApiError {
            position: Some((e.line(), e.column())),
            ..ApiError::bad_request("invalid-json", e.to_string())
        },
    })
}

pub fn value_into<T: DeserializeOwned>(v: Value, shape: impl Fn(String) -> ApiError) -> Result<T, ApiError> {
    serde_json::from_value(v).map_err(|e| shape(e.to_string()))
}

pub fn created(body: Value) -> Response {
    (StatusCode::CREATED, Json(body)).into_response()
}

pub fn completion(c: Completion) -> Response {
    match c {
        Completion::Done(v) => Json(v).into_response(),
        Completion::Pending(id) => (
            StatusCode::ACCEPTED,
            [(header::LOCATION, format!("/jobs/{id}"))],
            Json(serde_json::json!({ "job-id": id, "status": "running" })),
        )
            .into_response(),
    }
}
