//! Versioned measure cache.
//!
//! Triangle-local measures are patched on every mutation; everything global is
//! invalidated and recomputed on demand. Invariant: a `fresh` entry always
//! equals a from-scratch recomputation at the current graph version.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytics::{self, AnalyticsError, PageRankParams, Sampling};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::measure::{EdgeMeasure, MeasureKey, NodeMeasure, Strategy};
use crate::partitions::{Partition, PartitionMethod};

/// Sources used for betweenness and distances once a graph is past the exactness threshold.
pub const DEFAULT_SAMPLE_SOURCES: usize = 256;
pub const DEFAULT_EXACT_THRESHOLD: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "kebab-case")]
pub enum Values {
    Node(BTreeMap<NodeId, f64>),
    Edge(BTreeMap<EdgeId, f64>),
    Scalar(f64),
}

impl Values {
    pub fn as_node(&self) -> Option<&BTreeMap<NodeId, f64>> {
        match self {
            Values::Node(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_edge(&self) -> Option<&BTreeMap<EdgeId, f64>> {
        match self {
            Values::Edge(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Values::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    fn node_mut(&mut self) -> &mut BTreeMap<NodeId, f64> {
        match self {
            Values::Node(m) => m,
            _ => unreachable!("node-valued entry expected"),
        }
    }

    fn edge_mut(&mut self) -> &mut BTreeMap<EdgeId, f64> {
        match self {
            Values::Edge(m) => m,
            _ => unreachable!("edge-valued entry expected"),
        }
    }

    fn scalar_mut(&mut self) -> &mut f64 {
        match self {
            Values::Scalar(x) => x,
            _ => unreachable!("scalar entry expected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub values: Values,
    pub computed_at: u64,
    pub fresh: bool,
    pub exact: bool,
    /// Number of BFS sources used when the value was sampled.
    pub sampled_sources: Option<usize>,
}

/// Knobs for lazily computed measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeOptions {
    pub exact_threshold: usize,
    /// Requested sources above the threshold; `None` uses [`DEFAULT_SAMPLE_SOURCES`].
    pub sample_sources: Option<usize>,
    pub seed: u64,
    pub pagerank: PageRankParams,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            sample_sources: None,
            seed: 0,
            pagerank: PageRankParams::default(),
        }
    }
}

impl ComputeOptions {
    pub fn sampling(&self) -> Sampling {
        Sampling {
            sources: Some(self.sample_sources.unwrap_or(DEFAULT_SAMPLE_SOURCES)),
            exact_threshold: self.exact_threshold,
            seed: self.seed,
        }
    }
}

/// Output of one measure computation: every entry of the measure's group.
#[derive(Debug, Clone)]
pub struct Computed {
    pub version: u64,
    pub entries: Vec<(MeasureKey, CacheEntry)>,
}

#[derive(Debug, Clone, PartialEq)]
struct PartitionEntry {
    partition: Partition,
    computed_at: u64,
    fresh: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsCache {
    entries: BTreeMap<MeasureKey, CacheEntry>,
    partitions: BTreeMap<PartitionMethod, PartitionEntry>,
}

impl StatsCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache with every incremental measure initialised for `g`.
    pub fn for_graph(g: &Graph) -> Self {
        let mut cache = Self::new();
        cache.store(g.version(), Self::compute_incremental(g));
        cache
    }

    pub fn strategy(key: MeasureKey) -> Strategy {
        key.strategy()
    }

    pub fn get(&self, key: MeasureKey) -> Option<&CacheEntry> {
        self.entries.get(&key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (MeasureKey, &CacheEntry)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, e))
    }

    pub fn is_fresh(&self, key: MeasureKey) -> bool {
        self.entries.get(&key).is_some_and(|e| e.fresh)
    }

    /// Values of a fresh node measure.
    pub fn node_values(&self, key: MeasureKey) -> Option<&BTreeMap<NodeId, f64>> {
        self.entries.get(&key).filter(|e| e.fresh)?.values.as_node()
    }

    /// Values of a fresh edge measure.
    pub fn edge_values(&self, key: MeasureKey) -> Option<&BTreeMap<EdgeId, f64>> {
        self.entries.get(&key).filter(|e| e.fresh)?.values.as_edge()
    }

    pub fn scalar(&self, key: MeasureKey) -> Option<f64> {
        self.entries.get(&key).filter(|e| e.fresh)?.values.as_scalar()
    }

    /// Runs the computation that produces `key` (and its siblings) without touching any cache.
    pub fn compute(g: &Graph, key: MeasureKey, opts: &ComputeOptions) -> Result<Computed, AnalyticsError> {
        use MeasureKey::*;
        let version = g.version();
        let entry = |values, exact, sampled_sources| CacheEntry {
            values,
            computed_at: version,
            fresh: true,
            exact,
            sampled_sources,
        };
        let entries = match key {
            Degree | Triangles | LocalClustering | EdgeTriangles | TotalTriangles | Wedges | GlobalClustering => {
                return Ok(Self::compute_incremental(g));
            }
            Kcore | MaxKcore => {
                let k = analytics::kcore(g);
                vec![
                    (Kcore, entry(Values::Node(k.core.values), true, None)),
                    (MaxKcore, entry(Values::Scalar(k.max as f64), true, None)),
                ]
            }
            TriangleCore | MaxTriangleCore => {
                let t = analytics::triangle_core(g);
                vec![
                    (TriangleCore, entry(Values::Edge(t.values.values), true, None)),
                    (MaxTriangleCore, entry(Values::Scalar(t.max as f64), true, None)),
                ]
            }
            Betweenness => {
                let sampling = opts.sampling();
                let b = analytics::betweenness(g, &sampling)?;
                let used = sampling.effective_sources(g.node_count());
                vec![(Betweenness, entry(Values::Node(b.values), b.exact, used))]
            }
            Pagerank => {
                let pr = analytics::pagerank(g, &opts.pagerank)?;
                vec![(Pagerank, entry(Values::Node(pr.measure.values), pr.converged, None))]
            }
            Eccentricity | Diameter | MeanDistance | ComponentCount => {
                let sampling = opts.sampling();
                let d = analytics::distances(g, &sampling);
                let used = sampling.effective_sources(g.node_count());
                let exact = d.eccentricity.exact;
                vec![
                    (Eccentricity, entry(Values::Node(d.eccentricity.values), exact, used)),
                    (Diameter, entry(Values::Scalar(d.diameter), exact, used)),
                    (MeanDistance, entry(Values::Scalar(d.mean_distance), exact, used)),
                    (ComponentCount, entry(Values::Scalar(d.component_count as f64), true, None)),
                ]
            }
            Color | ColorCount => {
                let c = analytics::greedy_color(g);
                vec![
                    (Color, entry(Values::Node(c.colors.values), true, None)),
                    (ColorCount, entry(Values::Scalar(c.count as f64), true, None)),
                ]
            }
        };
        Ok(Computed { version, entries })
    }

    fn compute_incremental(g: &Graph) -> Computed {
        use MeasureKey::*;
        let version = g.version();
        let tri = analytics::triangle_counts(g);
        let clus = analytics::clustering(g, &tri);
        let degree = g.node_ids().map(|n| (n, g.degree(n) as f64)).collect();
        let entry = |values| CacheEntry {
            values,
            computed_at: version,
            fresh: true,
            exact: true,
            sampled_sources: None,
        };
        Computed {
            version,
            entries: vec![
                (Degree, entry(Values::Node(degree))),
                (Triangles, entry(Values::Node(tri.nodes.values))),
                (LocalClustering, entry(Values::Node(clus.local.values))),
                (EdgeTriangles, entry(Values::Edge(tri.edges.values))),
                (TotalTriangles, entry(Values::Scalar(tri.total as f64))),
                (Wedges, entry(Values::Scalar(clus.wedges as f64))),
                (GlobalClustering, entry(Values::Scalar(clus.global))),
            ],
        }
    }

    /// Stores a computation result if it was computed against
    /// `current_version`; otherwise the result is discarded and `false` returned.
    pub fn store(&mut self, current_version: u64, computed: Computed) -> bool {
        if computed.version != current_version {
            return false;
        }
        self.entries.extend(computed.entries);
        true
    }

    /// Whether a fresh entry for `key` computed with `opts` is cached for `g`.
    pub fn satisfies(&self, g: &Graph, key: MeasureKey, opts: &ComputeOptions) -> bool {
        let Some(e) = self.entries.get(&key) else {
            return false;
        };
        if !e.fresh || e.computed_at != g.version() {
            return false;
        }
        match key {
            MeasureKey::Betweenness | MeasureKey::Eccentricity | MeasureKey::Diameter | MeasureKey::MeanDistance => {
                e.sampled_sources == opts.sampling().effective_sources(g.node_count())
            }
            _ => true,
        }
    }

    /// Makes sure a fresh value for `key` is cached and returns it.
    pub fn ensure(&mut self, g: &Graph, key: MeasureKey, opts: &ComputeOptions) -> Result<&CacheEntry, AnalyticsError> {
        if !self.satisfies(g, key, opts) {
            let computed = Self::compute(g, key, opts)?;
            // Entries computed before a mutation are necessarily stale here.
            for e in self.entries.values_mut() {
                if e.computed_at != g.version() {
                    e.fresh = false;
                }
            }
            self.entries.extend(computed.entries);
        }
        Ok(&self.entries[&key])
    }

    pub fn node_measure(&mut self, g: &Graph, key: MeasureKey, opts: &ComputeOptions) -> Result<NodeMeasure, AnalyticsError> {
        let e = self.ensure(g, key, opts)?;
        Ok(NodeMeasure {
            measure: key,
            values: e.values.as_node().cloned().unwrap_or_default(),
            exact: e.exact,
        })
    }

    pub fn edge_measure(&mut self, g: &Graph, key: MeasureKey, opts: &ComputeOptions) -> Result<EdgeMeasure, AnalyticsError> {
        let e = self.ensure(g, key, opts)?;
        Ok(EdgeMeasure {
            measure: key,
            values: e.values.as_edge().cloned().unwrap_or_default(),
            exact: e.exact,
        })
    }

    /// Copies every entry and partition of `other` that is fresh at
    /// `current_version`. Used to merge work done on a snapshot; returns
    /// whether anything was taken.
    pub fn absorb(&mut self, current_version: u64, other: &StatsCache) -> bool {
        let entries: Vec<_> = other
            .entries
            .iter()
            .filter(|(_, e)| e.fresh && e.computed_at == current_version)
            .map(|(k, e)| (*k, e.clone()))
            .collect();
        let parts: Vec<_> = other
            .partitions
            .iter()
            .filter(|(_, p)| p.fresh && p.computed_at == current_version)
            .map(|(m, p)| (*m, p.clone()))
            .collect();
        let taken = !entries.is_empty() || !parts.is_empty();
        self.entries.extend(entries);
        self.partitions.extend(parts);
        taken
    }

    pub fn partition(&self, method: PartitionMethod) -> Option<&Partition> {
        self.partitions.get(&method).filter(|p| p.fresh).map(|p| &p.partition)
    }

    pub fn store_partition(&mut self, version: u64, partition: Partition) {
        self.partitions.insert(
            partition.method,
            PartitionEntry {
                partition,
                computed_at: version,
                fresh: true,
            },
        );
    }

    pub fn partition_version(&self, method: PartitionMethod) -> Option<u64> {
        self.partitions.get(&method).filter(|p| p.fresh).map(|p| p.computed_at)
    }

    fn incremental_ready(&self) -> bool {
        self.entries.get(&MeasureKey::Degree).is_some_and(|e| e.fresh)
    }

    fn node_map(&mut self, key: MeasureKey) -> &mut BTreeMap<NodeId, f64> {
        self.entries.get_mut(&key).expect("incremental entry").values.node_mut()
    }

    fn scalar_mut(&mut self, key: MeasureKey) -> &mut f64 {
        self.entries.get_mut(&key).expect("incremental entry").values.scalar_mut()
    }

    fn refresh_local_clustering(&mut self, nodes: impl IntoIterator<Item = NodeId>) {
        for n in nodes {
            let deg = self.node_map(MeasureKey::Degree)[&n];
            let tri = self.node_map(MeasureKey::Triangles)[&n];
            let value = analytics::local_clustering_value(tri as u64, deg as u64);
            self.node_map(MeasureKey::LocalClustering).insert(n, value);
        }
    }

    fn refresh_global_clustering(&mut self) {
        let total = *self.scalar_mut(MeasureKey::TotalTriangles);
        let wedges = *self.scalar_mut(MeasureKey::Wedges);
        *self.scalar_mut(MeasureKey::GlobalClustering) = analytics::global_clustering_value(total as u64, wedges as u64);
    }

    pub(crate) fn node_added(&mut self, id: NodeId) {
        if !self.incremental_ready() {
            return;
        }
        for key in [MeasureKey::Degree, MeasureKey::Triangles, MeasureKey::LocalClustering] {
            self.node_map(key).insert(id, 0.0);
        }
    }

    pub(crate) fn node_removed(&mut self, id: NodeId) {
        if !self.incremental_ready() {
            return;
        }
        for key in [MeasureKey::Degree, MeasureKey::Triangles, MeasureKey::LocalClustering] {
            self.node_map(key).remove(&id);
        }
    }

    /// `common` and the degrees are taken before the edge was inserted.
    pub(crate) fn edge_added(&mut self, g: &Graph, e: EdgeId, u: NodeId, v: NodeId, common: &[NodeId], du: usize, dv: usize) {
        if !self.incremental_ready() {
            return;
        }
        let c = common.len() as f64;
        *self.node_map(MeasureKey::Degree).get_mut(&u).unwrap() += 1.0;
        *self.node_map(MeasureKey::Degree).get_mut(&v).unwrap() += 1.0;
        let edge_tri = self.entries.get_mut(&MeasureKey::EdgeTriangles).unwrap().values.edge_mut();
        edge_tri.insert(e, c);
        for &w in common {
            for x in [u, v] {
                let side = g.find_edge(x, w).expect("common neighbor edge");
                *edge_tri.get_mut(&side).unwrap() += 1.0;
            }
        }
        let tri = self.node_map(MeasureKey::Triangles);
        for &w in common {
            *tri.get_mut(&w).unwrap() += 1.0;
        }
        *tri.get_mut(&u).unwrap() += c;
        *tri.get_mut(&v).unwrap() += c;
        *self.scalar_mut(MeasureKey::TotalTriangles) += c;
        *self.scalar_mut(MeasureKey::Wedges) += (du + dv) as f64;
        self.refresh_local_clustering([u, v].into_iter().chain(common.iter().copied()));
        self.refresh_global_clustering();
    }

    /// `common` and the degrees are taken before the edge was removed.
    pub(crate) fn edge_removed(&mut self, g: &Graph, e: EdgeId, u: NodeId, v: NodeId, common: &[NodeId], du: usize, dv: usize) {
        if !self.incremental_ready() {
            return;
        }
        let c = common.len() as f64;
        *self.node_map(MeasureKey::Degree).get_mut(&u).unwrap() -= 1.0;
        *self.node_map(MeasureKey::Degree).get_mut(&v).unwrap() -= 1.0;
        let edge_tri = self.entries.get_mut(&MeasureKey::EdgeTriangles).unwrap().values.edge_mut();
        edge_tri.remove(&e);
        for &w in common {
            for x in [u, v] {
                let side = g.find_edge(x, w).expect("common neighbor edge");
                *edge_tri.get_mut(&side).unwrap() -= 1.0;
            }
        }
        let tri = self.node_map(MeasureKey::Triangles);
        for &w in common {
            *tri.get_mut(&w).unwrap() -= 1.0;
        }
        *tri.get_mut(&u).unwrap() -= c;
        *tri.get_mut(&v).unwrap() -= c;
        *self.scalar_mut(MeasureKey::TotalTriangles) -= c;
        *self.scalar_mut(MeasureKey::Wedges) -= (du + dv - 2) as f64;
        self.refresh_local_clustering([u, v].into_iter().chain(common.iter().copied()));
        self.refresh_global_clustering();
    }

    /// Marks lazy measures stale after a topology change and stamps the
    /// incremental ones with `version`. Returns the measures affected.
    pub(crate) fn topology_changed(&mut self, version: u64) -> Vec<MeasureKey> {
        let mut changed = Vec::new();
        for (key, e) in self.entries.iter_mut() {
            match key.strategy() {
                Strategy::Incremental if e.fresh => {
                    e.computed_at = version;
                    changed.push(*key);
                }
                Strategy::LazyRecompute if e.fresh => {
                    e.fresh = false;
                    changed.push(*key);
                }
                _ => {}
            }
        }
        for p in self.partitions.values_mut() {
            p.fresh = false;
        }
        changed
    }

    /// Attribute-only change: every fresh entry stays valid at the new version.
    pub(crate) fn touch(&mut self, version: u64) {
        for e in self.entries.values_mut().filter(|e| e.fresh) {
            e.computed_at = version;
        }
        for p in self.partitions.values_mut().filter(|p| p.fresh) {
            p.computed_at = version;
        }
    }
}
