#![allow(dead_code)]

use std::collections::BTreeMap;

use axum::body::{Body, Bytes};
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use graphvis_core::io::{self, FormatId};
use graphvis_core::Graph;
use graphvis_server::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub struct Api {
    pub app: Router,
    pub state: AppState,
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub bytes: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.bytes.to_vec()).unwrap()
    }

    /// Asserts an error reply and returns its code.
    pub fn error(&self, status: u16) -> String {
        assert_eq!(self.status.as_u16(), status, "{}", self.text());
        let body = self.json();
        assert_eq!(body["status"], status);
        body["code"].as_str().unwrap().to_owned()
    }
}

impl Api {
    pub fn new() -> Self {
        Self::with(ServiceConfig::default())
    }

    pub fn with(config: ServiceConfig) -> Self {
        let state = AppState::new(config);
        Self {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn send(&self, method: Method, uri: &str, body: impl Into<Body>) -> Reply {
        let req = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        Reply { status, headers, bytes }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, Body::empty()).await
    }

    pub async fn post(&self, uri: &str, body: impl Into<Body>) -> Reply {
        self.send(Method::POST, uri, body).await
    }

    pub async fn put(&self, uri: &str, body: impl Into<Body>) -> Reply {
        self.send(Method::PUT, uri, body).await
    }

    pub async fn post_json(&self, uri: &str, body: &Value) -> Reply {
        self.post(uri, body.to_string()).await
    }

    /// Uploads `text`, returning the new graph id.
    pub async fn upload(&self, text: &str) -> u64 {
        let r = self.post("/graphs", text.to_owned()).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
        r.json()["graph-id"].as_u64().unwrap()
    }

    pub async fn graph(&self, id: u64) -> Graph {
        let r = self.get(&format!("/graphs/{id}")).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
        io::parse(&r.bytes, FormatId::Json).unwrap()
    }

    /// Current version, from the fetch header; the JSON format itself has none.
    pub async fn version(&self, id: u64) -> u64 {
        let r = self.get(&format!("/graphs/{id}")).await;
        r.headers["x-graph-version"].to_str().unwrap().parse().unwrap()
    }

    /// Node ids by label.
    pub async fn ids(&self, id: u64) -> BTreeMap<String, u64> {
        self.graph(id).await.nodes().map(|n| (n.label.clone(), n.id.0)).collect()
    }

    pub async fn summary(&self, id: u64) -> Value {
        let r = self.get(&format!("/graphs/{id}/summary")).await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
        r.json()
    }
}

pub const P3: &str = "a b\nb c\n";
pub const K3: &str = "a b\nb c\na c\n";
pub const K4: &str = "a b\na c\na d\nb c\nb d\nc d\n";
