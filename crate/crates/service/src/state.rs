use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use axum::http::StatusCode;
use graphvis_core::cache::DEFAULT_EXACT_THRESHOLD;
use graphvis_core::io::{LayoutMap, StyleSpec};
use graphvis_core::{ComputeOptions, Graph, MeasureKey, StatsCache};
use serde::Serialize;
use tokio::sync::broadcast;

use crate::error::ApiError;
use crate::workspace::{GraphMeta, SavedView, Setting, StoredGraph, WorkspaceFile};

/// Events kept per graph for reconnecting subscribers.
const HISTORY: usize = 4096;
/// Finished jobs kept for polling.
const FINISHED_JOBS: usize = 256;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub exact_threshold: usize,
    /// Requests whose computation runs longer than this answer 202 with a job id.
    pub job_timeout: Duration,
    pub workspace_path: Option<PathBuf>,
    pub max_body_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            job_timeout: Duration::from_secs(2),
            workspace_path: None,
            max_body_bytes: 256 << 20,
        }
    }
}

/// Pushed to subscribers after every applied mutation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GraphEvent {
    pub graph_id: u64,
    pub version: u64,
    pub changed_measures: Vec<MeasureKey>,
}

pub struct GraphState {
    pub graph: Graph,
    pub cache: StatsCache,
    pub layout: Option<LayoutMap>,
    pub style: Option<StyleSpec>,
}

struct Feed {
    history: VecDeque<GraphEvent>,
    tx: broadcast::Sender<GraphEvent>,
}

/// One stored graph. Writers hold `state` for the whole mutation, which
/// serializes mutations and keeps published versions in order.
pub struct Slot {
    pub id: u64,
    pub meta: GraphMeta,
    pub state: tokio::sync::RwLock<GraphState>,
    feed: Mutex<Feed>,
}

impl Slot {
    fn new(id: u64, meta: GraphMeta, graph: Graph, layout: Option<LayoutMap>, style: Option<StyleSpec>) -> Self {
        let cache = StatsCache::for_graph(&graph);
        Self {
            id,
            meta,
            state: tokio::sync::RwLock::new(GraphState {
                graph,
                cache,
                layout,
                style,
            }),
            feed: Mutex::new(Feed {
                history: VecDeque::new(),
                tx: broadcast::channel(1024).0,
            }),
        }
    }

    /// Call while holding the write lock that produced the events.
    pub fn publish(&self, events: impl IntoIterator<Item = GraphEvent>) {
        let mut feed = self.feed.lock().unwrap();
        for e in events {
            if feed.history.len() == HISTORY {
                feed.history.pop_front();
            }
            feed.history.push_back(e.clone());
            let _ = feed.tx.send(e);
        }
    }

    /// Past events newer than `since` plus a receiver for everything after them.
    pub fn subscribe(&self, since: Option<u64>) -> (Vec<GraphEvent>, broadcast::Receiver<GraphEvent>) {
        let feed = self.feed.lock().unwrap();
        let replay = match since {
            Some(v) => feed.history.iter().filter(|e| e.version > v).cloned().collect(),
            None => Vec::new(),
        };
        (replay, feed.tx.subscribe())
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum JobStatus {
    Running,
    Done { result: serde_json::Value },
    Failed { error: ApiError },
}

pub enum Completion {
    Done(serde_json::Value),
    Pending(u64),
}

struct Shared {
    config: ServiceConfig,
    graphs: RwLock<BTreeMap<u64, Arc<Slot>>>,
    next_id: AtomicU64,
    settings: Mutex<BTreeMap<String, Setting>>,
    views: Mutex<Vec<SavedView>>,
    jobs: Mutex<BTreeMap<u64, JobStatus>>,
    next_job: AtomicU64,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

pub fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn internal(msg: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", msg)
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self(Arc::new(Shared {
            config,
            graphs: RwLock::new(BTreeMap::new()),
            next_id: AtomicU64::new(1),
            settings: Mutex::new(BTreeMap::new()),
            views: Mutex::new(Vec::new()),
            jobs: Mutex::new(BTreeMap::new()),
            next_job: AtomicU64::new(1),
        }))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    pub fn compute_options(&self) -> ComputeOptions {
        ComputeOptions {
            exact_threshold: self.0.config.exact_threshold,
            ..ComputeOptions::default()
        }
    }

    pub fn graph(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        id.parse::<u64>()
            .ok()
            .and_then(|n| self.0.graphs.read().unwrap().get(&n).cloned())
            .ok_or_else(|| ApiError::unknown_graph(id))
    }

    pub fn graphs(&self) -> Vec<Arc<Slot>> {
        self.0.graphs.read().unwrap().values().cloned().collect()
    }

    pub fn insert(&self, meta: GraphMeta, graph: Graph) -> Arc<Slot> {
        let id = self.0.next_id.fetch_add(1, Ordering::SeqCst);
        let slot = Arc::new(Slot::new(id, meta, graph, None, None));
        self.0.graphs.write().unwrap().insert(id, slot.clone());
        slot
    }

    pub fn remove(&self, id: &str) -> Result<(), ApiError> {
        let n = id.parse::<u64>().map_err(|_| ApiError::unknown_graph(id))?;
        self.0.graphs.write().unwrap().remove(&n).map(|_| ()).ok_or_else(|| ApiError::unknown_graph(id))
    }

    pub fn settings(&self) -> BTreeMap<String, Setting> {
        self.0.settings.lock().unwrap().clone()
    }

    pub fn set_settings(&self, s: BTreeMap<String, Setting>) {
        *self.0.settings.lock().unwrap() = s;
    }

    pub fn views(&self) -> Vec<SavedView> {
        self.0.views.lock().unwrap().clone()
    }

    pub fn set_views(&self, v: Vec<SavedView>) {
        *self.0.views.lock().unwrap() = v;
    }

    pub async fn to_file(&self) -> WorkspaceFile {
        let mut graphs = Vec::new();
        for slot in self.graphs() {
            let s = slot.state.read().await;
            graphs.push(StoredGraph {
                id: slot.id,
                meta: slot.meta.clone(),
                graph: s.graph.clone(),
                layout: s.layout.clone(),
                style: s.style.clone(),
            });
        }
        WorkspaceFile {
            next_graph_id: self.0.next_id.load(Ordering::SeqCst),
            graphs,
            settings: self.settings(),
            views: self.views(),
            ..WorkspaceFile::default()
        }
    }

    /// Replaces every graph, setting and view. Existing event streams end.
    pub fn load_file(&self, file: WorkspaceFile) {
        let max_id = file.graphs.iter().map(|g| g.id).max().unwrap_or(0);
        let slots = file
            .graphs
            .into_iter()
            .map(|g| (g.id, Arc::new(Slot::new(g.id, g.meta, g.graph, g.layout, g.style))))
            .collect();
        *self.0.graphs.write().unwrap() = slots;
        self.0.next_id.store(file.next_graph_id.max(max_id + 1), Ordering::SeqCst);
        self.set_settings(file.settings);
        self.set_views(file.views);
    }

    pub fn job(&self, id: &str) -> Option<JobStatus> {
        let n: u64 = id.parse().ok()?;
        self.0.jobs.lock().unwrap().get(&n).cloned()
    }

    fn finish_job(&self, id: u64, status: JobStatus) {
        let mut jobs = self.0.jobs.lock().unwrap();
        jobs.insert(id, status);
        let finished: Vec<u64> = jobs.iter().filter(|(_, s)| !matches!(s, JobStatus::Running)).map(|(k, _)| *k).collect();
        for k in finished.iter().take(finished.len().saturating_sub(FINISHED_JOBS)) {
            jobs.remove(k);
        }
    }

    /// Runs `f` on a snapshot of the graph off the async runtime, then merges
    /// whatever it cached back if the graph has not changed meanwhile.
    pub async fn compute<T, F>(&self, slot: &Arc<Slot>, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&Graph, &mut StatsCache) -> Result<T, ApiError> + Send + 'static,
    {
        let (graph, mut cache) = {
            let s = slot.state.read().await;
            (s.graph.clone(), s.cache.clone())
        };
        let (version, cache, result) = tokio::task::spawn_blocking(move || {
            let r = f(&graph, &mut cache);
            (graph.version(), cache, r)
        })
        .await
        .map_err(|e| internal(format!("computation failed: {e}")))?;
        let mut s = slot.state.write().await;
        if s.graph.version() == version {
            s.cache.absorb(version, &cache);
        }
        result
    }

    /// [`AppState::compute`], handing the result over to a pollable job when
    /// it takes longer than the configured timeout.
    pub async fn compute_or_job<T, F>(&self, slot: &Arc<Slot>, f: F) -> Result<Completion, ApiError>
    where
        T: Serialize + Send + 'static,
        F: FnOnce(&Graph, &mut StatsCache) -> Result<T, ApiError> + Send + 'static,
    {
        let (state, slot) = (self.clone(), slot.clone());
        let mut task = tokio::spawn(async move {
            let value = state.compute(&slot, f).await?;
            serde_json::to_value(value).map_err(|e| internal(e.to_string()))
        });
        let joined = |r: Result<Result<serde_json::Value, ApiError>, tokio::task::JoinError>| {
            r.unwrap_or_else(|e| Err(internal(format!("computation failed: {e}"))))
        };
        match tokio::time::timeout(self.0.config.job_timeout, &mut task).await {
            Ok(r) => joined(r).map(Completion::Done),
            Err(_) => {
                let id = self.0.next_job.fetch_add(1, Ordering::SeqCst);
                self.0.jobs.lock().unwrap().insert(id, JobStatus::Running);
                let state = self.clone();
                tokio::spawn(async move {
                    let status = match joined(task.await) {
                        Ok(result) => JobStatus::Done { result },
                        Err(error) => JobStatus::Failed { error },
                    };
                    state.finish_job(id, status);
                });
                Ok(Completion::Pending(id))
            }
        }
    }
}
