//! Service criterion, driven in-process through the router.

use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use graphvis_server::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Api {
    app: Router,
}

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    bytes: Bytes,
}

impl Reply {
    fn json(&self) -> Result<Value, String> {
        serde_json::from_slice(&self.bytes).map_err(|e| format!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }
}

impl Api {
    fn new() -> Self {
        Self {
            app: router(AppState::new(ServiceConfig::default())),
        }
    }

    async fn send(&self, method: Method, uri: &str, body: impl Into<Body>) -> Reply {
        let req = Request::builder().method(method).uri(uri).body(body.into()).expect("request");
        let resp = self.app.clone().oneshot(req).await.expect("infallible");
        let status = resp.status();
        let headers = resp.headers().clone();
        let bytes = resp.into_body().collect().await.map(|b| b.to_bytes()).unwrap_or_default();
        Reply { status, headers, bytes }
    }

    async fn expect(&self, method: Method, uri: &str, body: impl Into<Body>, want: u16) -> Result<Reply, String> {
        let r = self.send(method.clone(), uri, body).await;
        if r.status.as_u16() != want {
            return Err(format!("{method} {uri}: {} instead of {want}: {}", r.status, String::from_utf8_lossy(&r.bytes)));
        }
        Ok(r)
    }

    async fn upload(&self, text: &str) -> Result<u64, String> {
        let r = self.expect(Method::POST, "/graphs", text.to_owned(), 201).await?;
        r.json()?["graph-id"].as_u64().ok_or_else(|| "upload without graph-id".into())
    }

    async fn version(&self, id: u64) -> Result<u64, String> {
        let r = self.expect(Method::GET, &format!("/graphs/{id}"), Body::empty(), 200).await?;
        r.headers["x-graph-version"].to_str().ok().and_then(|v| v.parse().ok()).ok_or_else(|| "missing version header".into())
    }
}

/// Opens an event stream and collects the versions of the first `n` events.
async fn event_versions(api: &Api, uri: &str, n: usize) -> Result<Vec<u64>, String> {
    let resp = api.app.clone().oneshot(Request::get(uri).body(Body::empty()).expect("request")).await.expect("infallible");
    if resp.status() != StatusCode::OK {
        return Err(format!("GET {uri}: {}", resp.status()));
    }
    let mut body = resp.into_body();
    let (mut buf, mut out) = (String::new(), Vec::new());
    while out.len() < n {
        while let Some(end) = buf.find("\n\n") {
            let block: String = buf.drain(..end + 2).collect();
            if let Some(data) = block.lines().find_map(|l| l.strip_prefix("data: ")) {
                let v: Value = serde_json::from_str(data).map_err(|e| e.to_string())?;
                out.push(v["version"].as_u64().ok_or("event without version")?);
            }
        }
        if out.len() >= n {
            break;
        }
        let frame = tokio::time::timeout(Duration::from_secs(5), body.frame())
            .await
            .map_err(|_| format!("only {} of {n} events arrived", out.len()))?
            .ok_or("event stream ended")?
            .map_err(|e| e.to_string())?;
        if let Ok(bytes) = frame.into_data() {
            buf.push_str(&String::from_utf8_lossy(&bytes));
        }
    }
    out.truncate(n);
    Ok(out)
}

const P3: &str = "a b\nb c\n";
const TIMED: &str = "a b 1 10\nb c 1 20\nc d 1 30\na d 2 40\n";

/// One request per route and method, with the status a client must see.
async fn every_endpoint(api: &Api) -> Result<usize, String> {
    let id = api.upload(TIMED).await?;
    let g = format!("/graphs/{id}");
    let n0 = api.expect(Method::GET, &format!("{g}/search?q=a"), Body::empty(), 200).await?.json()?["nodes"][0]
        .as_u64()
        .ok_or("search found no node")?;
    let catalog = api.expect(Method::GET, "/measures", Body::empty(), 200).await?.json()?;
    let measures = catalog.as_array().ok_or("catalog is not a list")?;
    for m in measures {
        let (target, key) = (m["target"].as_str().unwrap_or(""), m["id"].as_str().unwrap_or(""));
        api.expect(Method::GET, &format!("{g}/measures/{target}/{key}"), Body::empty(), 200).await?;
    }
    let layout = json!({ "positions": { n0.to_string(): { "x": 0.0, "y": 1.0 } }, "style": { "color-by": { "measure": "degree" } } });
    let chain = json!({ "filters": [{ "target": "node", "measure": "degree", "op": ">=", "threshold": 2.0 }] });
    let calls: Vec<(Method, String, String, u16)> = vec![
        (Method::GET, "/health".into(), String::new(), 200),
        (Method::GET, "/graphs".into(), String::new(), 200),
        (Method::POST, "/graphs".into(), json!({ "model": "er", "n": 6, "p": 0.5, "seed": 1 }).to_string(), 201),
        (Method::GET, format!("{g}/summary"), String::new(), 200),
        (Method::GET, format!("{g}/top/node/degree?k=2"), String::new(), 200),
        (Method::POST, format!("{g}/mutations"), json!([{ "kind": "insert-node", "label": "e" }]).to_string(), 200),
        (Method::POST, format!("{g}/insert"), json!({ "model": "pattern", "kind": "star", "size": 3, "attach-to": [n0] }).to_string(), 200),
        (Method::POST, format!("{g}/filter"), chain.to_string(), 200),
        (Method::POST, format!("{g}/filter?materialize=true"), chain.to_string(), 201),
        (Method::POST, format!("{g}/partitions"), json!({ "method": "community", "seed": 3 }).to_string(), 200),
        (Method::POST, format!("{g}/partitions"), json!({ "method": "role", "role-count": 2 }).to_string(), 200),
        (Method::POST, format!("{g}/partitions"), json!({ "method": "coloring" }).to_string(), 200),
        (Method::GET, format!("{g}/distributions/degree?kind=ccdf"), String::new(), 200),
        (Method::POST, format!("{g}/sample"), json!({ "method": "edge", "fraction": 0.5, "seed": 2 }).to_string(), 201),
        (Method::GET, format!("{g}/window?t0=10&t1=35"), String::new(), 201),
        (Method::GET, format!("{g}/timeline?width=10"), String::new(), 200),
        (Method::GET, format!("{g}/export?format=gexf"), String::new(), 200),
        (Method::GET, format!("{g}/export?format=svg"), String::new(), 200),
        (Method::PUT, format!("{g}/layout"), layout.to_string(), 200),
        (Method::GET, format!("{g}/layout"), String::new(), 200),
        // The stored layout covers one node only.
        (Method::GET, format!("{g}/export?format=svg"), String::new(), 422),
        (Method::GET, "/jobs/77".into(), String::new(), 404),
        (Method::PUT, "/workspace/settings".into(), json!({ "theme": "dark" }).to_string(), 200),
        (Method::GET, "/workspace/settings".into(), String::new(), 200),
        (Method::PUT, "/workspace/views".into(), json!([{ "name": "hubs", "filters": chain }]).to_string(), 200),
        (Method::GET, "/workspace/views".into(), String::new(), 200),
        (Method::GET, "/workspace".into(), String::new(), 200),
        (Method::POST, "/workspace/save".into(), String::new(), 409),
        (Method::GET, "/nowhere".into(), String::new(), 404),
    ];
    for (method, uri, body, want) in &calls {
        api.expect(method.clone(), uri, body.clone(), *want).await?;
    }
    let saved = api.expect(Method::GET, "/workspace", Body::empty(), 200).await?;
    api.expect(Method::PUT, "/workspace", saved.bytes, 200).await?;
    let fresh = api.upload(P3).await?;
    api.expect(Method::DELETE, &format!("/graphs/{fresh}"), Body::empty(), 204).await?;
    // The event stream is exercised by the ordering check.
    Ok(calls.len() + measures.len() + 4)
}

async fn atomicity(api: &Api) -> Result<(), String> {
    let id = api.upload(P3).await?;
    let uri = format!("/graphs/{id}");
    let before = api.expect(Method::GET, &uri, Body::empty(), 200).await?;
    let bad = json!([
        { "kind": "insert-node", "label": "d" },
        { "kind": "insert-edge", "u": 0, "v": 2 },
        { "kind": "delete-node", "id": 999 },
    ]);
    api.expect(Method::POST, &format!("{uri}/mutations"), bad.to_string(), 409).await?;
    let after = api.expect(Method::GET, &uri, Body::empty(), 200).await?;
    if after.bytes != before.bytes || after.headers["x-graph-version"] != before.headers["x-graph-version"] {
        return Err("a rejected batch changed the graph".into());
    }
    Ok(())
}

async fn event_ordering(api: &Api) -> Result<usize, String> {
    let id = api.upload(P3).await?;
    let v0 = api.version(id).await?;
    let uri = format!("/graphs/{id}/mutations");
    let mut writes = Vec::new();
    for i in 0..16 {
        let batch: Vec<Value> = (0..1 + i % 3).map(|j| json!({ "kind": "insert-node", "label": format!("n{i}-{j}") })).collect();
        let app = api.app.clone();
        let req = Request::post(uri.clone()).body(Body::from(Value::Array(batch).to_string())).expect("request");
        writes.push(tokio::spawn(async move { app.oneshot(req).await.map(|r| r.status()) }));
    }
    let mut applied = 0;
    for (i, w) in writes.into_iter().enumerate() {
        match w.await {
            Ok(Ok(StatusCode::OK)) => applied += 1 + i % 3,
            other => return Err(format!("write {i}: {other:?}")),
        }
    }
    let versions = event_versions(api, &format!("/graphs/{id}/events?since={v0}"), applied).await?;
    if !versions.windows(2).all(|w| w[1] > w[0]) {
        return Err(format!("event versions not strictly increasing: {versions:?}"));
    }
    if versions.first() != Some(&(v0 + 1)) || versions.last() != Some(&api.version(id).await?) {
        return Err(format!("events {versions:?} do not span the applied versions from {v0}"));
    }
    Ok(applied)
}

async fn workspace_round_trip(api: &Api) -> Result<(), String> {
    let a = api.upload(TIMED).await?;
    api.expect(Method::POST, &format!("/graphs/{a}/mutations"), json!([{ "kind": "delete-edge", "id": 1 }]).to_string(), 200).await?;
    let layout = json!({ "positions": { "0": { "x": 1.5, "y": -2.0 } }, "style": { "size-by": { "constant": 3.0 } } });
    api.expect(Method::PUT, &format!("/graphs/{a}/layout"), layout.to_string(), 200).await?;
    api.expect(Method::PUT, "/workspace/settings", json!({ "zoom": 1.25, "labels": true }).to_string(), 200).await?;
    let saved = api.expect(Method::GET, "/workspace", Body::empty(), 200).await?.bytes;

    let other = Api::new();
    other.expect(Method::PUT, "/workspace", saved.clone(), 200).await?;
    let resaved = other.expect(Method::GET, "/workspace", Body::empty(), 200).await?.bytes;
    if resaved != saved {
        return Err("re-saving a loaded workspace changed the file".into());
    }
    let ids: Vec<u64> = api
        .expect(Method::GET, "/graphs", Body::empty(), 200)
        .await?
        .json()?
        .as_array()
        .ok_or("list is not an array")?
        .iter()
        .filter_map(|g| g["graph-id"].as_u64())
        .collect();
    for id in ids {
        for path in [format!("/graphs/{id}"), format!("/graphs/{id}/layout")] {
            let (x, y) = (api.send(Method::GET, &path, Body::empty()).await, other.send(Method::GET, &path, Body::empty()).await);
            if x.bytes != y.bytes || x.headers.get("x-graph-version") != y.headers.get("x-graph-version") {
                return Err(format!("{path} differs after the round trip"));
            }
        }
    }
    Ok(())
}

async fn run() -> Result<String, String> {
    let api = Api::new();
    let calls = every_endpoint(&api).await?;
    atomicity(&api).await?;
    let events = event_ordering(&api).await?;
    workspace_round_trip(&api).await?;
    Ok(format!(
        "{calls} endpoint calls as documented; rejected batch left the graph unchanged; {events} events strictly increasing; workspace round trip lossless"
    ))
}

pub fn contract() -> Result<String, String> {
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().map_err(|e| e.to_string())?;
    rt.block_on(run())
}
