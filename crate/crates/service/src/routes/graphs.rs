use std::collections::{BTreeMap, BTreeSet};
use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::Json;
use graphvis_core::analytics::macro_summary;
use graphvis_core::explore::{self, SampleMethod, TimeWindow};
use graphvis_core::generators::{generate, insert_generated_outcome, GeneratorSpec};
use graphvis_core::io::{self, circular_layout, export_svg, ColorBy, LayoutMap, SizeBy, StyleSpec};
use graphvis_core::{apply_batch, FormatId, Graph, MeasureKey, Mutation, MutationOutcome, NodeId, StatsCache, Target};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio_stream::wrappers::BroadcastStream;
use tokio_stream::{Stream, StreamExt};

use super::{created, param, parse_json, required, value_into, Params};
use crate::error::ApiError;
use crate::state::{now_secs, AppState, GraphEvent, Slot};
use crate::workspace::GraphMeta;

fn info(slot: &Slot, g: &Graph) -> Value {
    json!({
        "graph-id": slot.id,
        "name": slot.meta.name,
        "created-at": slot.meta.created_at,
        "source-format": slot.meta.source_format,
        "node-count": g.node_count(),
        "edge-count": g.edge_count(),
        "version": g.version(),
        "directed": g.is_directed(),
    })
}

/// Stores a graph and starts computing its summary in the background.
pub(super) fn register(st: &AppState, name: String, source: &str, graph: Graph) -> (Arc<Slot>, Value) {
    let meta = GraphMeta {
        name,
        created_at: now_secs(),
        source_format: source.to_owned(),
    };
    let slot = st.insert(meta, graph);
    let body = {
        let s = slot.state.try_read().expect("slot is new");
        info(&slot, &s.graph)
    };
    let (st, bg) = (st.clone(), slot.clone());
    let opts = st.compute_options();
    tokio::spawn(async move {
        let _ = st.compute(&bg, move |g, c| macro_summary(g, c, &opts).map_err(ApiError::from)).await;
    });
    (slot, body)
}

pub async fn list(State(st): State<AppState>) -> Json<Value> {
    let mut out = Vec::new();
    for slot in st.graphs() {
        let s = slot.state.read().await;
        out.push(info(&slot, &s.graph));
    }
    Json(Value::Array(out))
}

/// A JSON object with a `model` key is a generator request; anything else is a file.
fn generator_request(body: &[u8]) -> Option<Value> {
    if body.iter().find(|b| !b.is_ascii_whitespace()) != Some(&b'{') {
        return None;
    }
    match serde_json::from_slice::<Value>(body) {
        Ok(v) if v.get("model").is_some() => Some(v),
        _ => None,
    }
}

fn invalid_spec(m: String) -> ApiError {
    ApiError::unprocessable("invalid-spec", m)
}

pub async fn create(State(st): State<AppState>, Query(q): Query<Params>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    if body.is_empty() {
        return Err(ApiError::bad_request("empty-body", "request body is empty"));
    }
    if !q.contains_key("format") {
        if let Some(v) = generator_request(&body) {
            let spec: GeneratorSpec = value_into(v, invalid_spec)?;
            spec.validate()?;
            let graph = tokio::task::spawn_blocking({
                let spec = spec.clone();
                move || generate(&spec)
            })
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
            let name = q.get("name").cloned().unwrap_or_else(|| "generated".into());
            let (_, mut body) = register(&st, name, "generated", graph);
            body["clipped"] = json!(spec.clipped());
            return Ok(created(body));
        }
    }
    let filename = q
        .get("filename")
        .cloned()
        .or_else(|| headers.get("x-filename").and_then(|h| h.to_str().ok()).map(str::to_owned))
        .unwrap_or_default();
    let fmt = match q.get("format") {
        Some(f) => f.parse::<FormatId>()?,
        None => io::detect_format(&filename, &body)?,
    };
    let graph = tokio::task::spawn_blocking(move || io::parse(&body, fmt))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let name = q.get("name").cloned().unwrap_or(if filename.is_empty() { "upload".into() } else { filename });
    let (_, mut body) = register(&st, name, fmt.as_str(), graph);
    body["detected-format"] = json!(fmt);
    Ok(created(body))
}

/// The graph in the JSON object format.
pub async fn fetch(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let s = slot.state.read().await;
    Ok((
        [
            (header::CONTENT_TYPE, "application/json".to_owned()),
            (header::HeaderName::from_static("x-graph-version"), s.graph.version().to_string()),
        ],
        io::write(&s.graph, FormatId::Json),
    )
        .into_response())
}

pub async fn remove(State(st): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    st.remove(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

/// Macro fields that are current after every mutation without recomputation,
/// plus lazily computed graph-level values that are still fresh.
fn macro_fields(g: &Graph, cache: &StatsCache) -> BTreeMap<String, f64> {
    let n = g.node_count();
    let max_degree = g.node_ids().map(|v| g.degree(v)).max().unwrap_or(0);
    let mut out = BTreeMap::from([
        ("node-count".to_owned(), n as f64),
        ("edge-count".to_owned(), g.edge_count() as f64),
        ("max-degree".to_owned(), max_degree as f64),
        ("avg-degree".to_owned(), if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / n as f64 }),
    ]);
    for key in MeasureKey::for_target(Target::Graph) {
        if let Some(e) = cache.get(key).filter(|e| e.fresh && e.computed_at == g.version()) {
            if let Some(x) = e.values.as_scalar() {
                out.insert(key.as_str().to_owned(), x);
            }
        }
    }
    out
}

fn deltas(before: &BTreeMap<String, f64>, after: &BTreeMap<String, f64>) -> Value {
    let changed: serde_json::Map<String, Value> = after
        .iter()
        .filter(|(k, v)| before.get(*k) != Some(v))
        .map(|(k, v)| (k.clone(), json!({ "before": before.get(k), "after": v })))
        .collect();
    Value::Object(changed)
}

fn changed_union(outcomes: &[MutationOutcome]) -> BTreeSet<MeasureKey> {
    outcomes.iter().flat_map(|o| o.changed_measures.iter().copied()).collect()
}

fn stale(g: &Graph, cache: &StatsCache, keys: &BTreeSet<MeasureKey>) -> Vec<MeasureKey> {
    keys.iter().copied().filter(|k| cache.get(*k).is_none_or(|e| !e.fresh || e.computed_at != g.version())).collect()
}

fn event(slot: &Slot, o: &MutationOutcome) -> GraphEvent {
    GraphEvent {
        graph_id: slot.id,
        version: o.version,
        changed_measures: o.changed_measures.clone(),
    }
}

pub async fn mutate(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let batch: Vec<Mutation> = parse_json(&body, |m| ApiError::new(StatusCode::CONFLICT, "invalid-mutation", m))?;
    let mut guard = slot.state.write().await;
    let s = &mut *guard;
    let before = macro_fields(&s.graph, &s.cache);
    let outcomes = apply_batch(&mut s.graph, &mut s.cache, &batch).map_err(|(i, e)| ApiError::from(e).context(format!("mutation {i}")))?;
    let after = macro_fields(&s.graph, &s.cache);
    slot.publish(outcomes.iter().map(|o| event(&slot, o)));
    let union = changed_union(&outcomes);
    Ok(Json(json!({
        "graph-id": slot.id,
        "version": s.graph.version(),
        "outcomes": outcomes,
        "changed": deltas(&before, &after),
        "changed-measures": union,
        "stale": stale(&s.graph, &s.cache, &union),
    })))
}

pub async fn insert(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let mut v: Value = parse_json(&body, invalid_spec)?;
    let attach: BTreeSet<NodeId> = match v.as_object_mut().and_then(|o| o.remove("attach-to")) {
        Some(a) => value_into(a, |m| invalid_spec(format!("attach-to: {m}")))?,
        None => BTreeSet::new(),
    };
    let spec: GeneratorSpec = value_into(v, invalid_spec)?;
    spec.validate()?;
    let mut guard = slot.state.write().await;
    let s = &mut *guard;
    let before = macro_fields(&s.graph, &s.cache);
    let outcome = insert_generated_outcome(&mut s.graph, &mut s.cache, &spec, &attach)?;
    let after = macro_fields(&s.graph, &s.cache);
    slot.publish([event(&slot, &outcome)]);
    let union = changed_union(std::slice::from_ref(&outcome));
    Ok(Json(json!({
        "graph-id": slot.id,
        "version": s.graph.version(),
        "inserted": outcome.created_nodes,
        "created-edges": outcome.created_edges,
        "changed": deltas(&before, &after),
        "changed-measures": union,
        "stale": stale(&s.graph, &s.cache, &union),
    })))
}

pub async fn search(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let query: String = required(&q, "q")?;
    let s = slot.state.read().await;
    Ok(Json(json!({ "version": s.graph.version(), "nodes": explore::search(&s.graph, &query) })))
}

#[derive(Deserialize)]
struct SampleRequest {
    method: SampleMethod,
    fraction: f64,
    #[serde(default)]
    seed: u64,
}

pub async fn sample(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let req: SampleRequest = parse_json(&body, |m| ApiError::unprocessable("invalid-argument", m))?;
    let g = {
        let s = slot.state.read().await;
        explore::sample(&s.graph, req.method, req.fraction, req.seed)?
    };
    let (_, body) = register(&st, format!("{} (sample)", slot.meta.name), "sample", g);
    Ok(created(body))
}

pub async fn window(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let w = TimeWindow::new(required(&q, "t0")?, required(&q, "t1")?)?;
    let g = {
        let s = slot.state.read().await;
        explore::time_window(&s.graph, w)?
    };
    let (_, body) = register(&st, format!("{} [{}, {})", slot.meta.name, w.t0, w.t1), "window", g);
    Ok(created(body))
}

pub async fn timeline(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let width: i64 = required(&q, "width")?;
    let s = slot.state.read().await;
    let h = explore::timeline(&s.graph, width)?;
    Ok(Json(json!({ "version": s.graph.version(), "width": width, "edges": h.edges, "counts": h.counts, "total": h.total })))
}

#[derive(Deserialize)]
struct LayoutBody {
    positions: LayoutMap,
    #[serde(default)]
    style: Option<StyleSpec>,
}

pub async fn put_layout(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let req: LayoutBody = parse_json(&body, |m| ApiError::unprocessable("invalid-layout", m))?;
    if let Some(style) = &req.style {
        style.validate()?;
    }
    let mut s = slot.state.write().await;
    let count = req.positions.len();
    s.layout = Some(req.positions);
    if req.style.is_some() {
        s.style = req.style;
    }
    Ok(Json(json!({ "version": s.graph.version(), "positions": count })))
}

pub async fn get_layout(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let slot = st.graph(&id)?;
    let s = slot.state.read().await;
    Ok(Json(json!({ "positions": s.layout, "style": s.style.clone().unwrap_or_default() })))
}

fn style_measures(style: &StyleSpec) -> Result<Vec<MeasureKey>, ApiError> {
    let keys: Vec<MeasureKey> = [
        match &style.color_by {
            ColorBy::Measure(k) => Some(*k),
            ColorBy::Constant(_) => None,
        },
        match &style.size_by {
            SizeBy::Measure(k) => Some(*k),
            SizeBy::Constant(_) => None,
        },
    ]
    .into_iter()
    .flatten()
    .collect();
    match keys.iter().find(|k| k.target() != Target::Node) {
        Some(k) => Err(ApiError::unprocessable("invalid-style", format!("'{}' is not a node measure", k.as_str()))),
        None => Ok(keys),
    }
}

pub async fn export(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let name: String = required(&q, "format")?;
    let disposition = |ext: &str| format!("attachment; filename=\"graph-{}.{ext}\"", slot.id);
    match name.to_ascii_lowercase().as_str() {
        "png" => Err(ApiError::unprocessable("unsupported-format", "PNG is rendered by the browser client from the SVG export")),
        "svg" => {
            let (layout, style) = {
                let s = slot.state.read().await;
                (s.layout.clone(), s.style.clone().unwrap_or_default())
            };
            let keys = style_measures(&style)?;
            let opts = st.compute_options();
            let svg = st
                .compute(&slot, move |g, cache| {
                    let layout = layout.unwrap_or_else(|| circular_layout(g));
                    let mut measures = BTreeMap::new();
                    for k in keys {
                        measures.insert(k, cache.node_measure(g, k, &opts)?);
                    }
                    Ok(export_svg(g, &layout, &style, &measures)?)
                })
                .await?;
            Ok(([(header::CONTENT_TYPE, "image/svg+xml".to_owned()), (header::CONTENT_DISPOSITION, disposition("svg"))], svg).into_response())
        }
        other => {
            let fmt: FormatId = other.parse()?;
            let s = slot.state.read().await;
            let text = io::write(&s.graph, fmt);
            Ok(([(header::CONTENT_TYPE, fmt.mime_type().to_owned()), (header::CONTENT_DISPOSITION, disposition(fmt.extension()))], text).into_response())
        }
    }
}

/// Server-sent events, one per applied mutation, with the version as event id.
/// `?since=` or `Last-Event-ID` replays retained events newer than that version.
pub async fn events(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<Params>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let slot = st.graph(&id)?;
    let since = match param::<u64>(&q, "since")? {
        Some(v) => Some(v),
        None => headers.get("last-event-id").and_then(|h| h.to_str().ok()).and_then(|s| s.parse().ok()),
    };
    let (replay, rx) = slot.subscribe(since);
    let live = BroadcastStream::new(rx).take_while(Result::is_ok).filter_map(Result::ok);
    let stream = tokio_stream::iter(replay).chain(live).map(|e| {
        Ok(Event::default()
            .id(e.version.to_string())
            .event("mutation")
            .data(serde_json::to_string(&e).expect("event serializes")))
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}
