mod common;

use std::collections::BTreeMap;

use axum::http::StatusCode;
use common::{Api, K3, K4, P3};
use graphvis_core::io::{self, FormatId};
use graphvis_oracles as oracle;
use serde_json::{json, Value};

fn node_values(body: &Value) -> BTreeMap<u64, f64> {
    body["values"].as_object().unwrap().iter().map(|(k, v)| (k.parse().unwrap(), v.as_f64().unwrap())).collect()
}

#[tokio::test]
async fn upload_reports_counts_and_format() {
    let api = Api::new();
    let r = api.post("/graphs", "1 2\n2 3").await;
    assert_eq!(r.status, StatusCode::CREATED);
    let body = r.json();
    assert_eq!((body["node-count"].as_u64(), body["edge-count"].as_u64()), (Some(3), Some(2)));
    assert_eq!(body["detected-format"], "edgelist-txt");

    assert_eq!(api.post("/graphs", "").await.error(400), "empty-body");

    let gexf = io::write(&io::parse(K3.as_bytes(), FormatId::EdgelistTxt).unwrap(), FormatId::Gexf);
    let r = api.post("/graphs?filename=k3.gexf", gexf.clone()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["detected-format"], "gexf");
    assert_eq!(r.json()["edge-count"], 3);
    let r = api.post("/graphs?format=graphml", gexf).await;
    assert_eq!(r.error(400), "parse-error");

    let r = api.post("/graphs", "a b\nb c x1\n").await;
    assert_eq!(r.error(400), "parse-error");
    assert_eq!(r.json()["position"], json!([2, 5]));

    assert_eq!(api.post("/graphs?format=xlsx", "a b").await.error(415), "unknown-format");
    assert_eq!(api.post("/graphs?filename=g.xlsx", "\u{1}\u{2}").await.error(415), "unknown-format");
}

#[tokio::test]
async fn generator_bodies_create_graphs() {
    let api = Api::new();
    let r = api.post_json("/graphs", &json!({ "model": "er", "n": 5, "p": 1.0, "seed": 3 })).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
    let body = r.json();
    assert_eq!((body["edge-count"].as_u64(), body["source-format"].as_str()), (Some(10), Some("generated")));
    assert_eq!(body["clipped"], false);

    assert_eq!(api.post_json("/graphs", &json!({ "model": "pa", "n": 5, "m": 0 })).await.error(422), "invalid-spec");
    assert_eq!(api.post_json("/graphs", &json!({ "model": "nope" })).await.error(422), "invalid-spec");

    let blocks = json!({
        "model": "block", "q": 0.0, "seed": 1,
        "blocks": [{ "size": 4, "base": { "model": "er", "p": 1.0 } }, { "size": 3, "base": { "model": "er", "p": 1.0 } }]
    });
    let id = api.post_json("/graphs", &blocks).await.json()["graph-id"].as_u64().unwrap();
    assert_eq!(api.summary(id).await["component-count"], 2);
}

#[tokio::test]
async fn summary_matches_oracle() {
    let api = Api::new();
    let id = api.upload(K3).await;
    let s = api.summary(id).await;
    let g = api.graph(id).await;
    assert_eq!(s["total-triangles"].as_u64(), Some(oracle::triangles(&g).total));
    assert_eq!(s["total-triangles"], 1);
    assert_eq!(s["node-count"], 3);
    assert_eq!(s["version"], api.version(id).await);

    assert_eq!(api.get("/graphs/999/summary").await.error(404), "unknown-graph");
    assert_eq!(api.get("/graphs/abc/summary").await.error(404), "unknown-graph");

    let empty = api.post_json("/graphs", &json!({ "model": "er", "n": 0, "p": 0.5 })).await.json()["graph-id"].as_u64().unwrap();
    let s = api.summary(empty).await;
    assert_eq!((s["node-count"].as_u64(), s["edge-count"].as_u64()), (Some(0), Some(0)));
}

#[tokio::test]
async fn measures_match_oracles() {
    let api = Api::new();
    let p3 = api.upload(P3).await;
    let ids = api.ids(p3).await;
    let r = api.get(&format!("/graphs/{p3}/measures/node/degree")).await;
    assert_eq!(r.status, StatusCode::OK);
    let body = r.json();
    assert_eq!(body["exact"], true);
    let deg = node_values(&body);
    assert_eq!((deg[&ids["a"]], deg[&ids["b"]], deg[&ids["c"]]), (1.0, 2.0, 1.0));

    let btw = node_values(&api.get(&format!("/graphs/{p3}/measures/node/betweenness")).await.json());
    let want = oracle::betweenness(&api.graph(p3).await);
    for (v, x) in want {
        assert!((btw[&v.0] - x).abs() < 1e-12);
    }

    let k4 = api.upload(K4).await;
    let body = api.get(&format!("/graphs/{k4}/measures/edge/triangle-core")).await.json();
    let cores = node_values(&body);
    assert_eq!(cores.len(), 6);
    let want = oracle::triangle_core(&api.graph(k4).await);
    assert!(cores.iter().all(|(e, &x)| x == 4.0 && want[&graphvis_core::EdgeId(*e)] == 4));

    let body = api.get(&format!("/graphs/{k4}/measures/graph/total-triangles")).await.json();
    assert_eq!(body["value"], 4.0);

    let sampled = api.get(&format!("/graphs/{k4}/measures/node/betweenness?sample=2&seed=5")).await.json();
    assert_eq!((sampled["exact"].as_bool(), sampled["sampled-sources"].as_u64()), (Some(false), Some(2)));

    assert_eq!(api.get(&format!("/graphs/{p3}/measures/node/bogus")).await.error(422), "unknown-measure");
    assert_eq!(api.get(&format!("/graphs/{p3}/measures/edge/degree")).await.error(422), "unknown-measure");
    assert_eq!(api.get(&format!("/graphs/{p3}/measures/face/degree")).await.error(422), "unknown-measure");
    assert_eq!(api.get(&format!("/graphs/{p3}/measures/node/betweenness?sample=0")).await.error(422), "invalid-sample-count");
    assert_eq!(api.get(&format!("/graphs/{p3}/measures/node/degree?sample=x")).await.error(400), "bad-query");
    assert_eq!(api.get("/graphs/77/measures/node/degree").await.error(404), "unknown-graph");
}

#[tokio::test]
async fn mutations_report_deltas_and_are_atomic() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let ids = api.ids(id).await;
    let v0 = api.version(id).await;
    assert_eq!(api.summary(id).await["max-kcore"], 1);

    let close = json!([{ "kind": "insert-edge", "u": ids["a"], "v": ids["c"] }]);
    let r = api.post_json(&format!("/graphs/{id}/mutations"), &close).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    let body = r.json();
    assert_eq!(body["version"], v0 + 1);
    assert_eq!(body["changed"]["total-triangles"], json!({ "before": 0.0, "after": 1.0 }));
    assert_eq!(body["changed"]["edge-count"], json!({ "before": 2.0, "after": 3.0 }));
    assert!(body["changed"].get("node-count").is_none());
    assert!(body["stale"].as_array().unwrap().contains(&json!("kcore")));
    assert_eq!(api.summary(id).await["total-triangles"], 1);

    let before = api.get(&format!("/graphs/{id}")).await.bytes;
    let bad = json!([
        { "kind": "insert-node", "label": "d" },
        { "kind": "delete-node", "id": 999 },
    ]);
    let r = api.post_json(&format!("/graphs/{id}/mutations"), &bad).await;
    assert_eq!(r.error(409), "unknown-node");
    assert!(r.json()["message"].as_str().unwrap().starts_with("mutation 1"));
    assert_eq!(api.get(&format!("/graphs/{id}")).await.bytes, before);

    let r = api.post_json(&format!("/graphs/{id}/mutations"), &json!([])).await;
    assert_eq!(r.json()["version"], v0 + 1);
    assert_eq!(r.json()["changed"], json!({}));

    let dup = json!([{ "kind": "insert-edge", "u": ids["a"], "v": ids["b"] }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/mutations"), &dup).await.error(409), "duplicate-edge");
    assert_eq!(api.post_json(&format!("/graphs/{id}/mutations"), &json!([{ "kind": "explode" }])).await.error(409), "invalid-mutation");
    assert_eq!(api.post(&format!("/graphs/{id}/mutations"), "[{").await.error(400), "invalid-json");
    assert_eq!(api.post_json("/graphs/12/mutations", &json!([])).await.error(404), "unknown-graph");

    let rename = json!([{ "kind": "update-attrs", "target": { "node": ids["b"] }, "label": "middle", "set": { "score": 2.5 } }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/mutations"), &rename).await.status, StatusCode::OK);
    let g = api.graph(id).await;
    assert_eq!(g.node(graphvis_core::NodeId(ids["b"])).unwrap().label, "middle");
}

#[tokio::test]
async fn filters_keep_or_materialize() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let ids = api.ids(id).await;
    let chain = json!({ "filters": [{ "target": "node", "measure": "degree", "op": ">=", "threshold": 2.0 }] });
    let r = api.post_json(&format!("/graphs/{id}/filter"), &chain).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    assert_eq!(r.json()["nodes"], json!([ids["b"]]));
    assert_eq!(r.json()["edges"], json!([]));

    let r = api.post_json(&format!("/graphs/{id}/filter?materialize=true"), &chain).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let new = r.json()["graph-id"].as_u64().unwrap();
    assert_ne!(new, id);
    assert_eq!(api.summary(new).await["node-count"], 1);

    let bare = json!([{ "target": "edge", "measure": "edge-triangles", "op": "=", "threshold": 0.0 }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/filter"), &bare).await.json()["edge-count"], 2);

    assert_eq!(api.post_json(&format!("/graphs/{id}/filter"), &json!({ "filters": [] })).await.error(400), "empty-chain");
    let unknown = json!([{ "target": "node", "measure": "bogus", "op": ">", "threshold": 0 }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/filter"), &unknown).await.error(422), "unknown-measure");
    let wrong = json!([{ "target": "edge", "measure": "degree", "op": ">", "threshold": 0 }]);
    assert_eq!(api.post_json(&format!("/graphs/{id}/filter"), &wrong).await.error(422), "unknown-measure");
    assert_eq!(api.post_json("/graphs/40/filter", &chain).await.error(404), "unknown-graph");
}

#[tokio::test]
async fn insertion_attaches_generated_structure() {
    let api = Api::new();
    let empty = api.post_json("/graphs", &json!({ "model": "er", "n": 0, "p": 0.0 })).await.json()["graph-id"].as_u64().unwrap();
    let r = api.post_json(&format!("/graphs/{empty}/insert"), &json!({ "model": "pattern", "kind": "clique", "size": 3 })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    assert_eq!(r.json()["inserted"].as_array().unwrap().len(), 3);
    assert_eq!(r.json()["changed"]["total-triangles"]["after"], 1.0);
    assert_eq!(api.summary(empty).await["total-triangles"], 1);

    let id = api.upload(P3).await;
    let ids = api.ids(id).await;
    let star = json!({ "model": "pattern", "kind": "star", "size": 4, "attach-to": [ids["a"]] });
    let r = api.post_json(&format!("/graphs/{id}/insert"), &star).await;
    let inserted: Vec<u64> = r.json()["inserted"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    let g = api.graph(id).await;
    assert_eq!(g.neighbors(graphvis_core::NodeId(ids["a"])).filter(|(w, _)| inserted.contains(&w.0)).count(), 1);
    assert_eq!(g.edge_count(), 2 + 3 + 1);
    assert_eq!(oracle::components(&g).len(), 1);

    assert_eq!(api.post_json(&format!("/graphs/{id}/insert"), &json!({ "model": "pa", "n": 3, "m": 0 })).await.error(422), "invalid-spec");
    let missing = json!({ "model": "pattern", "kind": "chain", "size": 2, "attach-to": [999] });
    assert_eq!(api.post_json(&format!("/graphs/{id}/insert"), &missing).await.error(409), "unknown-node");
}

#[tokio::test]
async fn partitions_endpoint() {
    let api = Api::new();
    let two = api.upload("a b\nb c\na c\nx y\ny z\nx z\n").await;
    let r = api.post_json(&format!("/graphs/{two}/partitions"), &json!({ "method": "community", "seed": 1 })).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    assert_eq!(r.json()["group-count"], 2);
    assert!(r.json()["quality"].as_f64().unwrap() > 0.0);
    assert_eq!(api.summary(two).await["community-count"], 2);

    let k4 = api.upload(K4).await;
    let r = api.post_json(&format!("/graphs/{k4}/partitions"), &json!({ "method": "role", "k": 1 })).await;
    assert_eq!(r.json()["group-count"], 1);
    let r = api.post_json(&format!("/graphs/{k4}/partitions"), &json!({ "method": "coloring" })).await;
    assert_eq!(r.json()["group-count"], 4);
    let assignment: BTreeMap<graphvis_core::NodeId, usize> = serde_json::from_value(r.json()["assignment"].clone()).unwrap();
    assert!(oracle::is_proper_coloring(&api.graph(k4).await, &assignment));

    assert_eq!(api.post_json(&format!("/graphs/{k4}/partitions"), &json!({ "method": "kmeans" })).await.error(422), "unknown-method");
    assert_eq!(api.post_json(&format!("/graphs/{k4}/partitions"), &json!({ "method": "role" })).await.error(422), "invalid-role-count");
    assert_eq!(api.post_json(&format!("/graphs/{k4}/partitions"), &json!({ "method": "role", "role-count": 9 })).await.error(422), "invalid-role-count");
}

#[tokio::test]
async fn distributions() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let hist = api.get(&format!("/graphs/{id}/distributions/degree")).await.json();
    assert_eq!(hist["points"], json!([[1.0, 2.0], [2.0, 1.0]]));
    assert_eq!(hist["bins"]["total"], 3);
    let cdf = api.get(&format!("/graphs/{id}/distributions/degree?kind=cdf")).await.json();
    let last = cdf["points"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last[1], 1.0);
    let ccdf = api.get(&format!("/graphs/{id}/distributions/degree?kind=ccdf&bins=unit")).await.json();
    assert_eq!(ccdf["points"][0][1], 1.0);
    let two = api.get(&format!("/graphs/{id}/distributions/local-clustering?bins=2")).await.json();
    assert_eq!(two["bins"]["counts"].as_array().unwrap().len(), 2);
    let edges = api.get(&format!("/graphs/{id}/distributions/edge-triangles")).await.json();
    assert_eq!(edges["bins"]["total"], 2);

    assert_eq!(api.get(&format!("/graphs/{id}/distributions/bogus")).await.error(422), "unknown-measure");
    assert_eq!(api.get(&format!("/graphs/{id}/distributions/diameter")).await.error(422), "unknown-measure");
    assert_eq!(api.get(&format!("/graphs/{id}/distributions/degree?kind=pdf")).await.error(400), "bad-query");
}

#[tokio::test]
async fn windows_and_timelines() {
    let api = Api::new();
    let id = api.upload("a b 1 10\nb c 1 20\nc d 1 30\n").await;
    let r = api.get(&format!("/graphs/{id}/window?t0=10&t1=25")).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
    assert_eq!(r.json()["edge-count"], 2);
    assert_eq!(r.json()["source-format"], "window");

    let t = api.get(&format!("/graphs/{id}/timeline?width=10")).await.json();
    assert_eq!(t["counts"], json!([1, 1, 1]));

    let plain = api.upload(P3).await;
    assert_eq!(api.get(&format!("/graphs/{plain}/window?t0=0&t1=5")).await.error(422), "no-temporal-data");
    assert_eq!(api.get(&format!("/graphs/{plain}/timeline?width=10")).await.error(422), "no-temporal-data");
    assert_eq!(api.get(&format!("/graphs/{id}/window?t0=30&t1=10")).await.error(422), "invalid-window");
    assert_eq!(api.get(&format!("/graphs/{id}/window?t0=1")).await.error(400), "bad-query");
    assert_eq!(api.get(&format!("/graphs/{id}/timeline?width=0")).await.error(422), "invalid-argument");
}

#[tokio::test]
async fn exports() {
    let api = Api::new();
    let id = api.upload(K3).await;
    let r = api.get(&format!("/graphs/{id}/export?format=graphml")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.headers["content-type"], FormatId::Graphml.mime_type());
    let back = io::parse(&r.bytes, FormatId::Graphml).unwrap();
    assert!(oracle::isomorphic_labeled(&api.graph(id).await, &back));

    for f in FormatId::ALL {
        let r = api.get(&format!("/graphs/{id}/export?format={}", f.as_str())).await;
        let back = io::parse(&r.bytes, f).unwrap();
        assert_eq!((back.node_count(), back.edge_count()), (3, 3), "{f}");
    }

    let single = api.post_json("/graphs", &json!({ "model": "er", "n": 1, "p": 0.0 })).await.json()["graph-id"].as_u64().unwrap();
    let svg = api.get(&format!("/graphs/{single}/export?format=svg")).await;
    assert_eq!(svg.headers["content-type"], "image/svg+xml");
    assert_eq!(svg.text().matches("<circle").count(), 1);

    assert_eq!(api.get(&format!("/graphs/{id}/export?format=png")).await.error(422), "unsupported-format");
    assert_eq!(api.get(&format!("/graphs/{id}/export?format=docx")).await.error(415), "unknown-format");
    assert_eq!(api.get(&format!("/graphs/{id}/export")).await.error(400), "bad-query");
}

#[tokio::test]
async fn stored_layouts_drive_svg_export() {
    let api = Api::new();
    let id = api.upload(P3).await;
    let ids = api.ids(id).await;
    let layout = json!({
        "positions": { ids["a"].to_string(): { "x": 0.0, "y": 0.0 }, ids["b"].to_string(): { "x": 1.0, "y": 0.0 }, ids["c"].to_string(): { "x": 2.0, "y": 1.0 } },
        "style": { "color-by": { "measure": "degree" }, "size-by": { "constant": 4.0 } }
    });
    let r = api.put(&format!("/graphs/{id}/layout"), layout.to_string()).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.text());
    assert_eq!(api.get(&format!("/graphs/{id}/layout")).await.json()["style"]["color-by"], json!({ "measure": "degree" }));

    let svg = api.get(&format!("/graphs/{id}/export?format=svg")).await.text();
    assert_eq!(svg.matches("<circle").count(), 3);
    assert_eq!(svg.matches("<line").count(), 2);
    assert!(svg.contains("#2020df") && svg.contains("#df2020"), "{svg}");
    assert_eq!(api.get(&format!("/graphs/{id}/export?format=svg")).await.text(), svg);

    let grow = json!([{ "kind": "insert-node", "label": "d" }]);
    api.post_json(&format!("/graphs/{id}/mutations"), &grow).await;
    assert_eq!(api.get(&format!("/graphs/{id}/export?format=svg")).await.error(422), "missing-layout");

    let bad = json!({ "positions": {}, "style": { "background": "url(x)" } });
    assert_eq!(api.put(&format!("/graphs/{id}/layout"), bad.to_string()).await.error(422), "invalid-style");
    let graph_level = json!({ "positions": {}, "style": { "color-by": { "measure": "diameter" } } });
    api.put(&format!("/graphs/{id}/layout"), graph_level.to_string()).await;
    assert_eq!(api.get(&format!("/graphs/{id}/export?format=svg")).await.error(422), "invalid-style");
}

#[tokio::test]
async fn graph_listing_fetch_delete_and_catalog() {
    let api = Api::new();
    assert_eq!(api.get("/graphs").await.json(), json!([]));
    let a = api.upload(P3).await;
    let b = api.post("/graphs?name=triangle", K3).await.json()["graph-id"].as_u64().unwrap();
    let list = api.get("/graphs").await.json();
    assert_eq!(list.as_array().unwrap().len(), 2);
    assert_eq!(list[1]["name"], "triangle");

    let r = api.get(&format!("/graphs/{a}")).await;
    assert_eq!(r.headers["x-graph-version"], api.version(a).await.to_string().as_str());
    let r = api.send(axum::http::Method::DELETE, &format!("/graphs/{b}"), axum::body::Body::empty()).await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    assert_eq!(api.get(&format!("/graphs/{b}")).await.error(404), "unknown-graph");
    assert_eq!(api.send(axum::http::Method::DELETE, &format!("/graphs/{b}"), axum::body::Body::empty()).await.error(404), "unknown-graph");

    let catalog = api.get("/measures").await.json();
    assert_eq!(catalog.as_array().unwrap().len(), graphvis_core::MeasureKey::ALL.len());
    assert_eq!(catalog[0], json!({ "id": "degree", "target": "node", "strategy": "incremental" }));
    assert_eq!(api.get("/health").await.json()["status"], "ok");
    assert_eq!(api.get("/nowhere").await.error(404), "not-found");
}

#[tokio::test]
async fn search_sample_and_top_k() {
    let api = Api::new();
    let id = api.upload("alpha beta\nbeta gamma\nalpha gamma\ngamma delta\n").await;
    let ids = api.ids(id).await;
    let r = api.get(&format!("/graphs/{id}/search?q=AL")).await.json();
    assert_eq!(r["nodes"], json!([ids["alpha"]]));
    assert_eq!(api.get(&format!("/graphs/{id}/search")).await.error(400), "bad-query");

    let top = api.get(&format!("/graphs/{id}/top/node/degree?k=1")).await.json();
    assert_eq!(top["items"], json!([{ "id": ids["gamma"], "value": 3.0 }]));
    assert_eq!(api.get(&format!("/graphs/{id}/top/node/degree?k=0")).await.error(422), "invalid-argument");
    assert_eq!(api.get(&format!("/graphs/{id}/top/graph/diameter")).await.error(422), "unknown-measure");

    let r = api.post_json(&format!("/graphs/{id}/sample"), &json!({ "method": "edge", "fraction": 0.5, "seed": 2 })).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["edge-count"], 2);
    let r = api.post_json(&format!("/graphs/{id}/sample"), &json!({ "method": "node-induced", "fraction": 2.0 })).await;
    assert_eq!(r.error(422), "invalid-argument");
}
