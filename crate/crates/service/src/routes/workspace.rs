use std::collections::BTreeMap;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};

use super::parse_json;
use crate::error::ApiError;
use crate::state::AppState;
use crate::workspace::{SavedView, Setting, WorkspaceFile};

pub async fn save(State(st): State<AppState>) -> Response {
    let file = st.to_file().await;
    (
        [
            (header::CONTENT_TYPE, "application/json"),
            (header::CONTENT_DISPOSITION, "attachment; filename=\"workspace.json\""),
        ],
        file.to_bytes(),
    )
        .into_response()
}

pub async fn load(State(st): State<AppState>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let file = WorkspaceFile::from_bytes(&body)?;
    let count = file.graphs.len();
    st.load_file(file);
    Ok(Json(json!({ "graph-count": count })))
}

/// Writes the workspace to the file given at startup.
pub async fn persist(State(st): State<AppState>) -> Result<Json<Value>, ApiError> {
    let path = st
        .config()
        .workspace_path
        .clone()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "no-workspace-path", "the server was started without a workspace file"))?;
    let file = st.to_file().await;
    let count = file.graphs.len();
    tokio::fs::write(&path, file.to_bytes())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io-error", format!("{}: {e}", path.display())))?;
    Ok(Json(json!({ "path": path, "graph-count": count })))
}

pub async fn get_settings(State(st): State<AppState>) -> Json<BTreeMap<String, Setting>> {
    Json(st.settings())
}

pub async fn put_settings(State(st): State<AppState>, body: Bytes) -> Result<Json<BTreeMap<String, Setting>>, ApiError> {
    let s: BTreeMap<String, Setting> = parse_json(&body, |m| ApiError::bad_request("invalid-settings", format!("settings must map names to scalars: {m}")))?;
    st.set_settings(s.clone());
    Ok(Json(s))
}

pub async fn get_views(State(st): State<AppState>) -> Json<Vec<SavedView>> {
    Json(st.views())
}

pub async fn put_views(State(st): State<AppState>, body: Bytes) -> Result<Json<Vec<SavedView>>, ApiError> {
    let views: Vec<SavedView> = parse_json(&body, |m| ApiError::unprocessable("invalid-view", m))?;
    for v in &views {
        v.style.validate().map_err(|e| ApiError::from(e).context(format!("view '{}'", v.name)))?;
    }
    st.set_views(views.clone());
    Ok(Json(views))
}
