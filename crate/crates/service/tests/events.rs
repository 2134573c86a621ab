mod common;

use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use common::{Api, P3};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

/// Reads server-sent events until `n` arrived.
struct Events {
    body: Body,
    buf: String,
}

impl Events {
    async fn open(api: &Api, uri: &str) -> Self {
        let resp = api.app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
        assert_eq!(resp.status(), StatusCode::OK);
        assert_eq!(resp.headers()["content-type"], "text/event-stream");
        Self {
            body: resp.into_body(),
            buf: String::new(),
        }
    }

    async fn next(&mut self) -> Option<(String, Value)> {
        loop {
            if let Some(end) = self.buf.find("\n\n") {
                let block: String = self.buf.drain(..end + 2).collect();
                let mut id = None;
                let mut data = None;
                for line in block.lines() {
                    if let Some(v) = line.strip_prefix("id: ") {
                        id = Some(v.to_owned());
                    } else if let Some(v) = line.strip_prefix("data: ") {
                        data = Some(serde_json::from_str(v).unwrap());
                    }
                }
                match (id, data) {
                    (Some(id), Some(data)) => return Some((id, data)),
                    _ => continue,
                }
            }
            let frame = tokio::time::timeout(Duration::from_secs(5), self.body.frame()).await.ok()??.ok()?;
            if let Ok(bytes) = frame.into_data() {
                self.buf.push_str(std::str::from_utf8(&bytes).unwrap());
            }
        }
    }

    async fn take(&mut self, n: usize) -> Vec<Value> {
        let mut out = Vec::new();
        while out.len() < n {
            let (id, data) = self.next().await.expect("event stream ended early");
            assert_eq!(id, data["version"].to_string());
            out.push(data);
        }
        out
    }

    /// Nothing else arrives within a short grace period.
    async fn quiet(&mut self) -> bool {
        tokio::time::timeout(Duration::from_millis(200), self.next()).await.is_err()
    }
}

fn insert_node(label: &str) -> Value {
    json!([{ "kind": "insert-node", "label": label }])
}

#[tokio::test]
async fn one_mutation_one_event() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    let r = api.post_json(&format!("/graphs/{id}/mutations"), &insert_node("d")).await;
    let version = r.json()["version"].clone();
    let got = events.take(1).await;
    assert_eq!(got[0]["version"], version);
    assert_eq!(got[0]["graph-id"], id);
    assert!(got[0]["changed-measures"].as_array().unwrap().contains(&json!("degree")));
    assert!(events.quiet().await);
}

#[tokio::test]
async fn unknown_graph_has_no_stream() {
    let api = Api::new();
    assert_eq!(api.get("/graphs/5/events").await.error(404), "unknown-graph");
}

#[tokio::test]
async fn versions_are_ordered_without_gaps() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let v0 = api.version(id).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    api.post_json(&format!("/graphs/{id}/mutations"), &insert_node("x")).await;
    api.post_json(&format!("/graphs/{id}/mutations"), &insert_node("y")).await;
    let batch = json!([
        { "kind": "insert-node", "label": "p" },
        { "kind": "insert-node", "label": "q" },
        { "kind": "insert-node", "label": "r" },
    ]);
    api.post_json(&format!("/graphs/{id}/mutations"), &batch).await;
    api.post_json(&format!("/graphs/{id}/mutations"), &json!([])).await;
    let versions: Vec<u64> = events.take(5).await.iter().map(|e| e["version"].as_u64().unwrap()).collect();
    assert_eq!(versions, (v0 + 1..=v0 + 5).collect::<Vec<_>>());
    assert!(events.quiet().await);
}

#[tokio::test]
async fn rejected_batches_publish_nothing() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    let bad = json!([{ "kind": "insert-node" }, { "kind": "delete-edge", "id": 404 }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/mutations"), &bad).await.status, StatusCode::CONFLICT);
    assert!(events.quiet().await);
}

#[tokio::test]
async fn concurrent_writers_are_serialized() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let v0 = api.version(id).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    let writers: Vec<_> = (0..24)
        .map(|i| {
            let app = api.app.clone();
            tokio::spawn(async move {
                let body = insert_node(&format!("n{i}")).to_string();
                let req = Request::post(format!("/graphs/{id}/mutations")).body(Body::from(body)).unwrap();
                app.oneshot(req).await.unwrap().status()
            })
        })
        .collect();
    for w in writers {
        assert_eq!(w.await.unwrap(), StatusCode::OK);
    }
    let versions: Vec<u64> = events.take(24).await.iter().map(|e| e["version"].as_u64().unwrap()).collect();
    assert_eq!(versions, (v0 + 1..=v0 + 24).collect::<Vec<_>>());
    assert_eq!(api.graph(id).await.node_count(), 3 + 24);
    assert_eq!(api.version(id).await, v0 + 24);
}

#[tokio::test]
async fn reconnecting_clients_replay_missed_versions() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let v0 = api.version(id).await;
    for label in ["x", "y", "z"] {
        api.post_json(&format!("/graphs/{id}/mutations"), &insert_node(label)).await;
    }
    let mut events = Events::open(&api, &format!("/graphs/{id}/events?since={}", v0 + 1)).await;
    let replayed: Vec<u64> = events.take(2).await.iter().map(|e| e["version"].as_u64().unwrap()).collect();
    assert_eq!(replayed, vec![v0 + 2, v0 + 3]);
    api.post_json(&format!("/graphs/{id}/mutations"), &insert_node("w")).await;
    assert_eq!(events.take(1).await[0]["version"], v0 + 4);

    let req = Request::get(format!("/graphs/{id}/events")).header("last-event-id", (v0 + 3).to_string()).body(Body::empty()).unwrap();
    let resp = api.app.clone().oneshot(req).await.unwrap();
    let mut events = Events {
        body: resp.into_body(),
        buf: String::new(),
    };
    assert_eq!(events.take(1).await[0]["version"], v0 + 4);
}

#[tokio::test]
async fn insertion_publishes_one_event() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    let r = api.post_json(&format!("/graphs/{id}/insert"), &json!({ "model": "pattern", "kind": "cycle", "size": 5 })).await;
    assert_eq!(events.take(1).await[0]["version"], r.json()["version"]);
    assert!(events.quiet().await);
}

#[tokio::test]
async fn deleting_a_graph_ends_its_stream() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let mut events = Events::open(&api, &format!("/graphs/{id}/events")).await;
    api.send(axum::http::Method::DELETE, &format!("/graphs/{id}"), Body::empty()).await;
    // Wait for the background summary task to release its handle on the graph.
    assert!(tokio::time::timeout(Duration::from_secs(5), events.next()).await.unwrap().is_none());
}
