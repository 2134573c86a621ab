use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use graphvis_core::analytics::macro_summary;
use graphvis_core::explore::{self, Binning, Comparator, FilterChain, FilterExpr, FilterTarget};
use graphvis_core::partitions::{coloring, communities_label_propagation, roles};
use graphvis_core::{CacheEntry, ComputeOptions, Graph, MeasureKey, StatsCache, Target, Values};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{completion, created, param, parse_json, Params};
use crate::error::ApiError;
use crate::state::AppState;

pub async fn catalog() -> Json<Value> {
    let all: Vec<Value> = MeasureKey::ALL
        .iter()
        .map(|k| json!({ "id": k, "target": k.target(), "strategy": k.strategy() }))
        .collect();
    Json(Value::Array(all))
}

/// `sample=k` asks for a `k`-source estimate of the path-based measures
/// regardless of graph size; `seed` picks the sources.
fn options(st: &AppState, q: &Params) -> Result<ComputeOptions, ApiError> {
    let mut opts = st.compute_options();
    if let Some(k) = param::<usize>(q, "sample")? {
        if k == 0 {
            return Err(ApiError::unprocessable("invalid-sample-count", "sample must be at least 1"));
        }
        opts.sample_sources = Some(k);
        opts.exact_threshold = 0;
    }
    if let Some(seed) = param(q, "seed")? {
        opts.seed = seed;
    }
    Ok(opts)
}

pub async fn summary(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let opts = options(&st, &q)?;
    let c = st
        .compute_or_job(&slot, move |g, cache| macro_summary(g, cache, &opts).map_err(ApiError::from))
        .await?;
    Ok(completion(c))
}

fn measure_body(graph_id: u64, key: MeasureKey, e: &CacheEntry) -> Value {
    let mut body = json!({
        "graph-id": graph_id,
        "version": e.computed_at,
        "measure": key,
        "target": key.target(),
        "exact": e.exact,
        "sampled-sources": e.sampled_sources,
    });
    match &e.values {
        Values::Node(m) => body["values"] = json!(m),
        Values::Edge(m) => body["values"] = json!(m),
        Values::Scalar(x) => body["value"] = json!(x),
    }
    body
}

fn parse_key(target: &str, measure: &str) -> Result<MeasureKey, ApiError> {
    let target: Target = target.parse()?;
    Ok(MeasureKey::parse_for(target, measure)?)
}

pub async fn measure(
    State(st): State<AppState>,
    Path((id, target, measure)): Path<(String, String, String)>,
    Query(q): Query<Params>,
) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let key = parse_key(&target, &measure)?;
    let opts = options(&st, &q)?;
    {
        let s = slot.state.read().await;
        if s.cache.satisfies(&s.graph, key, &opts) {
            let e = s.cache.get(key).expect("satisfied entries exist");
            return Ok(Json(measure_body(slot.id, key, e)).into_response());
        }
    }
    let gid = slot.id;
    let c = st
        .compute_or_job(&slot, move |g, cache| Ok(measure_body(gid, key, cache.ensure(g, key, &opts)?)))
        .await?;
    Ok(completion(c))
}

fn not_per_element(key: MeasureKey) -> ApiError {
    ApiError::unprocessable("unknown-measure", format!("'{}' is a graph-level measure", key.as_str()))
}

/// Values of a node or edge measure keyed by id, as `(id, value)` pairs.
fn element_values(g: &Graph, cache: &mut StatsCache, key: MeasureKey, opts: &ComputeOptions) -> Result<(Vec<(u64, f64)>, bool), ApiError> {
    let e = cache.ensure(g, key, opts)?;
    let pairs = match &e.values {
        Values::Node(m) => m.iter().map(|(k, v)| (k.0, *v)).collect(),
        Values::Edge(m) => m.iter().map(|(k, v)| (k.0, *v)).collect(),
        Values::Scalar(_) => return Err(not_per_element(key)),
    };
    Ok((pairs, e.exact))
}

pub async fn top(
    State(st): State<AppState>,
    Path((id, target, measure)): Path<(String, String, String)>,
    Query(q): Query<Params>,
) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let key = parse_key(&target, &measure)?;
    if key.target() == Target::Graph {
        return Err(not_per_element(key));
    }
    let k = param::<usize>(&q, "k")?.unwrap_or(10);
    let opts = options(&st, &q)?;
    let c = st
        .compute_or_job(&slot, move |g, cache| {
            let (pairs, exact) = element_values(g, cache, key, &opts)?;
            let ranked = explore::top_k(&pairs.into_iter().collect(), k)?;
            let items: Vec<Value> = ranked.iter().map(|(id, x)| json!({ "id": id, "value": x })).collect();
            Ok(json!({ "version": g.version(), "measure": key, "exact": exact, "items": items }))
        })
        .await?;
    Ok(completion(c))
}

#[derive(Deserialize)]
struct RawFilter {
    target: FilterTarget,
    measure: String,
    op: Comparator,
    threshold: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawChain {
    Wrapped { filters: Vec<RawFilter> },
    Bare(Vec<RawFilter>),
}

fn filter_chain(body: &[u8]) -> Result<FilterChain, ApiError> {
    let raw: RawChain = parse_json(body, |m| ApiError::unprocessable("invalid-filter", m))?;
    let (RawChain::Wrapped { filters } | RawChain::Bare(filters)) = raw;
    let filters = filters
        .into_iter()
        .map(|f| {
            let target = match f.target {
                FilterTarget::Node => Target::Node,
                FilterTarget::Edge => Target::Edge,
            };
            Ok(FilterExpr {
                target: f.target,
                measure: MeasureKey::parse_for(target, &f.measure)?,
                op: f.op,
                threshold: f.threshold,
            })
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    let chain = FilterChain::new(filters);
    chain.validate()?;
    Ok(chain)
}

pub async fn filter(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<Params>, body: Bytes) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let chain = filter_chain(&body)?;
    let materialize = param::<bool>(&q, "materialize")?.unwrap_or(false);
    let opts = st.compute_options();
    if !materialize {
        let c = st
            .compute_or_job(&slot, move |g, cache| {
                let kept = explore::filter(g, &chain, cache, &opts)?;
                Ok(json!({
                    "version": kept.version,
                    "node-count": kept.nodes.len(),
                    "edge-count": kept.edges.len(),
                    "nodes": kept.nodes,
                    "edges": kept.edges,
                }))
            })
            .await?;
        return Ok(completion(c));
    }
    let g = st
        .compute(&slot, move |g, cache| {
            let kept = explore::filter(g, &chain, cache, &opts)?;
            Ok(explore::materialize_filter(g, &kept))
        })
        .await?;
    let (_, body) = super::graphs::register(&st, format!("{} (filtered)", slot.meta.name), "filtered", g);
    Ok(created(body))
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
struct PartitionRequest {
    method: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_sweeps")]
    max_sweeps: usize,
    #[serde(default, alias = "k")]
    role_count: Option<usize>,
}

fn default_sweeps() -> usize {
    100
}

pub async fn partitions(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let req: PartitionRequest = parse_json(&body, |m| ApiError::unprocessable("invalid-partition-request", m))?;
    let method = req.method.to_ascii_lowercase();
    if !matches!(method.as_str(), "community" | "role" | "coloring") {
        return Err(ApiError::unprocessable(
            "unknown-method",
            format!("unknown partition method '{}'; expected community, role or coloring", req.method),
        ));
    }
    if method == "role" && req.role_count.is_none() {
        return Err(ApiError::unprocessable("invalid-role-count", "role partitions need 'role-count'"));
    }
    let c = st
        .compute_or_job(&slot, move |g, cache| {
            let p = match method.as_str() {
                "community" => communities_label_propagation(g, req.seed, req.max_sweeps),
                "role" => roles(g, req.role_count.unwrap_or_default(), req.seed)?,
                _ => coloring(g),
            };
            cache.store_partition(g.version(), p.clone());
            let mut body = serde_json::to_value(&p).expect("partition serializes");
            body["version"] = json!(g.version());
            Ok(body)
        })
        .await?;
    Ok(completion(c))
}

pub async fn distribution(
    State(st): State<AppState>,
    Path((id, measure)): Path<(String, String)>,
    Query(q): Query<Params>,
) -> Result<Response, ApiError> {
    let slot = st.graph(&id)?;
    let key: MeasureKey = measure.parse()?;
    if key.target() == Target::Graph {
        return Err(not_per_element(key));
    }
    let kind = q.get("kind").map(String::as_str).unwrap_or("hist").to_owned();
    if !matches!(kind.as_str(), "hist" | "cdf" | "ccdf") {
        return Err(ApiError::bad_request("bad-query", format!("kind must be hist, cdf or ccdf, got '{kind}'")));
    }
    let bins = match q.get("bins").map(String::as_str) {
        None => None,
        Some("unit") => Some(Binning::Unit),
        Some(_) => Some(Binning::Count(param(&q, "bins")?.expect("present"))),
    };
    let opts = st.compute_options();
    let c = st
        .compute_or_job(&slot, move |g, cache| {
            let (pairs, exact) = element_values(g, cache, key, &opts)?;
            let values: Vec<f64> = pairs.into_iter().map(|(_, x)| x).collect();
            let binning = bins.unwrap_or(if values.iter().all(|x| x.fract() == 0.0) { Binning::Unit } else { Binning::Count(20) });
            let h = explore::histogram(&values, binning)?;
            let points: Vec<(f64, f64)> = match kind.as_str() {
                "hist" => h.nonzero().into_iter().map(|(x, c)| (x, c as f64)).collect(),
                "cdf" => explore::cdf_ccdf(&h)?.cdf,
                _ => explore::cdf_ccdf(&h)?.ccdf,
            };
            Ok(json!({
                "version": g.version(),
                "measure": key,
                "kind": kind,
                "exact": exact,
                "bins": h,
                "points": points,
            }))
        })
        .await?;
    Ok(completion(c))
}

pub async fn job(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let status = st
        .job(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown-job", format!("no job with id '{id}'")))?;
    let mut body = serde_json::to_value(status).expect("job status serializes");
    body["job-id"] = json!(id.parse::<u64>().unwrap_or_default());
    Ok(Json(body))
}
