//! Non-destructive exploration: filter chains, distributions, ranking,
//! sampling, text search and temporal windows.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::cache::{ComputeOptions, StatsCache};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::measure::{MeasureKey, Target};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExploreError {
    #[error("measure '{measure}' is not a {target} measure")]
    UnknownMeasure { measure: String, target: String },
    #[error("measure '{0}' has no fresh value at the current graph version")]
    MeasureNotComputed(MeasureKey),
    #[error("filter chain is empty")]
    EmptyChain,
    #[error("no values to bin")]
    EmptyValues,
    #[error("unit bins need integer-valued data")]
    NonIntegerValues,
    #[error("values must be finite")]
    NonFiniteValue,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("graph has no timestamped edges")]
    NoTemporalData,
    #[error("time window needs t0 < t1, got [{t0}, {t1})")]
    InvalidWindow { t0: i64, t1: i64 },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = "=", alias = "==")]
    Eq,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Comparator {
    pub fn holds(self, x: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => x < threshold,
            Comparator::Le => x <= threshold,
            Comparator::Eq => x == threshold,
            Comparator::Ge => x >= threshold,
            Comparator::Gt => x > threshold,
        }
    }
}

/// Filter target; graph-level measures cannot be filtered on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterTarget {
    Node,
    Edge,
}

impl FilterTarget {
    fn target(self) -> Target {
        match self {
            FilterTarget::Node => Target::Node,
            FilterTarget::Edge => Target::Edge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterExpr {
    pub target: FilterTarget,
    pub measure: MeasureKey,
    pub op: Comparator,
    pub threshold: f64,
}

impl FilterExpr {
    pub fn node(measure: MeasureKey, op: Comparator, threshold: f64) -> Self {
        Self {
            target: FilterTarget::Node,
            measure,
            op,
            threshold,
        }
    }

    pub fn edge(measure: MeasureKey, op: Comparator, threshold: f64) -> Self {
        Self {
            target: FilterTarget::Edge,
            measure,
            op,
            threshold,
        }
    }

    pub fn validate(&self) -> Result<(), ExploreError> {
        if self.measure.target() != self.target.target() {
            return Err(ExploreError::UnknownMeasure {
                measure: self.measure.as_str().to_owned(),
                target: format!("{:?}", self.target).to_lowercase(),
            });
        }
        Ok(())
    }
}

/// Conjunctive filter chain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterChain {
    pub filters: Vec<FilterExpr>,
}

impl FilterChain {
    pub fn new(filters: Vec<FilterExpr>) -> Self {
        Self { filters }
    }

    pub fn then(mut self, f: FilterExpr) -> Self {
        self.filters.push(f);
        self
    }

    pub fn validate(&self) -> Result<(), ExploreError> {
        if self.filters.is_empty() {
            return Err(ExploreError::EmptyChain);
        }
        self.filters.iter().try_for_each(FilterExpr::validate)
    }
}

/// Result of a filter: the selection plus the version it is valid for.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeptSets {
    pub version: u64,
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeId>,
}

/// Evaluates `chain` against the fresh values in `cache`.
pub fn apply_filter(g: &Graph, chain: &FilterChain, cache: &StatsCache) -> Result<KeptSets, ExploreError> {
    chain.validate()?;
    let mut nodes: BTreeSet<NodeId> = g.node_ids().collect();
    let mut edges: BTreeSet<EdgeId> = g.edge_ids().collect();
    for f in &chain.filters {
        let stale = || ExploreError::MeasureNotComputed(f.measure);
        if cache.get(f.measure).is_none_or(|e| e.computed_at != g.version()) {
            return Err(stale());
        }
        match f.target {
            FilterTarget::Node => {
                let values = cache.node_values(f.measure).ok_or_else(stale)?;
                nodes.retain(|n| values.get(n).is_some_and(|&x| f.op.holds(x, f.threshold)));
            }
            FilterTarget::Edge => {
                let values = cache.edge_values(f.measure).ok_or_else(stale)?;
                edges.retain(|e| values.get(e).is_some_and(|&x| f.op.holds(x, f.threshold)));
            }
        }
    }
    edges.retain(|e| {
        let r = g.edge(*e).expect("edge ids come from the graph");
        nodes.contains(&r.u) && nodes.contains(&r.v)
    });
    Ok(KeptSets {
        version: g.version(),
        nodes,
        edges,
    })
}

/// Computes any missing measures of `chain`, then filters.
pub fn filter(g: &Graph, chain: &FilterChain, cache: &mut StatsCache, opts: &ComputeOptions) -> Result<KeptSets, ExploreError> {
    chain.validate()?;
    for f in &chain.filters {
        cache.ensure(g, f.measure, opts)?;
    }
    apply_filter(g, chain, cache)
}

/// Copies the kept selection into a new graph, keeping ids.
pub fn materialize_filter(g: &Graph, kept: &KeptSets) -> Graph {
    g.extract(&kept.nodes, &kept.edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "bins")]
pub enum Binning {
    Count(usize),
    /// One bin `[k, k+1)` per integer in `[min, max]`.
    Unit,
}

/// Bins are left-closed and right-open, except the last which is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    fn locate(&self, x: f64) -> usize {
        let k = self.counts.len();
        let (lo, hi) = (self.edges[0], self.edges[k]);
        let mut i = (((x - lo) / (hi - lo)) * k as f64).floor().clamp(0.0, (k - 1) as f64) as usize;
        while i > 0 && x < self.edges[i] {
            i -= 1;
        }
        while i + 1 < k && x >= self.edges[i + 1] {
            i += 1;
        }
        i
    }

    /// `(left edge, count)` pairs with nonzero count.
    pub fn nonzero(&self) -> Vec<(f64, u64)> {
        self.edges.iter().zip(&self.counts).filter(|(_, &c)| c > 0).map(|(&e, &c)| (e, c)).collect()
    }
}

pub fn histogram(values: &[f64], binning: Binning) -> Result<Histogram, ExploreError> {
    if values.is_empty() {
        return Err(ExploreError::EmptyValues);
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(ExploreError::NonFiniteValue);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total = values.len() as u64;
    match binning {
        Binning::Unit => {
            if values.iter().any(|x| x.fract() != 0.0) {
                return Err(ExploreError::NonIntegerValues);
            }
            let (lo, hi) = (lo as i64, hi as i64);
            let k = usize::try_from(hi - lo + 1).map_err(|_| ExploreError::InvalidArgument("value range too large".into()))?;
            if k > 10_000_000 {
                return Err(ExploreError::InvalidArgument("value range too large for unit bins".into()));
            }
            let mut counts = vec![0u64; k];
            for &x in values {
                counts[(x as i64 - lo) as usize] += 1;
            }
            let edges = (lo..=hi + 1).map(|e| e as f64).collect();
            Ok(Histogram { edges, counts, total })
        }
        Binning::Count(k) => {
            if k == 0 {
                return Err(ExploreError::InvalidArgument("bin count must be at least 1".into()));
            }
            let hi = if hi > lo {
                hi
            } else {
                // Degenerate range: widen so every edge stays distinct.
                lo + f64::EPSILON * lo.abs().max(1.0) * (2 * k) as f64
            };
            let step = (hi - lo) / k as f64;
            let mut edges: Vec<f64> = (0..k).map(|i| lo + step * i as f64).collect();
            edges.push(hi);
            let mut h = Histogram {
                edges,
                counts: vec![0; k],
                total,
            };
            for &x in values {
                let i = h.locate(x);
                h.counts[i] += 1;
            }
            Ok(h)
        }
    }
}

/// `(x, y)` points of the empirical CDF and CCDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    /// `P(X <= right edge of bin i)`.
    pub cdf: Vec<(f64, f64)>,
    /// `P(X >= left edge of bin i)`.
    pub ccdf: Vec<(f64, f64)>,
}

pub fn cdf_ccdf(h: &Histogram) -> Result<Distribution, ExploreError> {
    if h.total == 0 {
        return Err(ExploreError::EmptyValues);
    }
    let total = h.total as f64;
    let mut cdf = Vec::with_capacity(h.counts.len());
    let mut ccdf = Vec::with_capacity(h.counts.len());
    let mut before = 0u64;
    for (i, &c) in h.counts.iter().enumerate() {
        ccdf.push((h.edges[i], (h.total - before) as f64 / total));
        before += c;
        cdf.push((h.edges[i + 1], before as f64 / total));
    }
    Ok(Distribution { cdf, ccdf })
}

/// Highest values first, ties by ascending id.
pub fn top_k<K: Ord + Copy>(values: &BTreeMap<K, f64>, k: usize) -> Result<Vec<(K, f64)>, ExploreError> {
    if k == 0 {
        return Err(ExploreError::InvalidArgument("k must be at least 1".into()));
    }
    let mut ranked: Vec<(K, f64)> = values.iter().map(|(&id, &x)| (id, x)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    #[serde(alias = "uniform-node-induced")]
    NodeInduced,
    #[serde(alias = "uniform-edge")]
    Edge,
}

fn sample_count(fraction: f64, population: usize) -> usize {
    ((fraction * population as f64).ceil() as usize).min(population)
}

/// Seeded uniform sample; ids of the original graph are kept.
pub fn sample(g: &Graph, method: SampleMethod, fraction: f64, seed: u64) -> Result<Graph, ExploreError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(ExploreError::InvalidArgument(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match method {
        SampleMethod::NodeInduced => {
            let ids: Vec<NodeId> = g.node_ids().collect();
            let k = sample_count(fraction, ids.len());
            let nodes: BTreeSet<NodeId> = rand::seq::index::sample(&mut rng, ids.len(), k).into_iter().map(|i| ids[i]).collect();
            let edges = g
                .edges()
                .filter(|e| nodes.contains(&e.u) && nodes.contains(&e.v))
                .map(|e| e.id)
                .collect();
            Ok(g.extract(&nodes, &edges))
        }
        SampleMethod::Edge => {
            let ids: Vec<EdgeId> = g.edge_ids().collect();
            let k = sample_count(fraction, ids.len());
            let edges: BTreeSet<EdgeId> = rand::seq::index::sample(&mut rng, ids.len(), k).into_iter().map(|i| ids[i]).collect();
            let nodes = edges
                .iter()
                .flat_map(|e| {
                    let r = g.edge(*e).expect("sampled from the graph");
                    [r.u, r.v]
                })
                .collect();
            Ok(g.extract(&nodes, &edges))
        }
    }
}

/// Case-insensitive substring search over labels and textual attributes.
pub fn search(g: &Graph, query: &str) -> Vec<NodeId> {
    let q = query.to_lowercase();
    g.nodes()
        .filter(|n| {
            n.label.to_lowercase().contains(&q)
                || n.attributes.values().filter_map(|a| a.as_text()).any(|t| t.to_lowercase().contains(&q))
        })
        .map(|n| n.id)
        .collect()
}

/// Half-open window `[t0, t1)` in epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t0: i64,
    pub t1: i64,
}

impl TimeWindow {
    pub fn new(t0: i64, t1: i64) -> Result<Self, ExploreError> {
        if t0 < t1 {
            Ok(Self { t0, t1 })
        } else {
            Err(ExploreError::InvalidWindow { t0, t1 })
        }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.t0 <= t && t < self.t1
    }
}

fn timestamps(g: &Graph) -> Result<Vec<i64>, ExploreError> {
    let ts: Vec<i64> = g.edges().filter_map(|e| e.timestamp).collect();
    if ts.is_empty() {
        Err(ExploreError::NoTemporalData)
    } else {
        Ok(ts)
    }
}

/// Timestamped edges inside `w` plus their endpoints.
pub fn time_window(g: &Graph, w: TimeWindow) -> Result<Graph, ExploreError> {
    if w.t0 >= w.t1 {
        return Err(ExploreError::InvalidWindow { t0: w.t0, t1: w.t1 });
    }
    timestamps(g)?;
    let kept: Vec<_> = g.edges().filter(|e| e.timestamp.is_some_and(|t| w.contains(t))).collect();
    let nodes = kept.iter().flat_map(|e| [e.u, e.v]).collect();
    let edges = kept.iter().map(|e| e.id).collect();
    Ok(g.extract(&nodes, &edges))
}

/// Edge-timestamp histogram with bins of `width` seconds starting at the
/// earliest timestamp. A width covering the whole span gives one bin.
pub fn timeline(g: &Graph, width: i64) -> Result<Histogram, ExploreError> {
    if width <= 0 {
        return Err(ExploreError::InvalidArgument("bin width must be positive".into()));
    }
    let ts = timestamps(g)?;
    let lo = *ts.iter().min().expect("nonempty");
    let hi = *ts.iter().max().expect("nonempty");
    let span = hi - lo;
    let k = if width >= span { 1 } else { (span / width) as usize + 1 };
    let mut counts = vec![0u64; k];
    for t in &ts {
        counts[(((t - lo) / width) as usize).min(k - 1)] += 1;
    }
    let edges = (0..=k as i64).map(|i| (lo + i * width) as f64).collect();
    Ok(Histogram {
        edges,
        counts,
        total: ts.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Attributes;
    use crate::testing::*;

    fn run(g: &Graph, chain: FilterChain) -> KeptSets {
        let mut cache = StatsCache::for_graph(g);
        filter(g, &chain, &mut cache, &ComputeOptions::default()).unwrap()
    }

    #[test]
    fn degree_filter_on_path() {
        let g = path(3);
        let kept = run(&g, FilterChain::default().then(FilterExpr::node(MeasureKey::Degree, Comparator::Ge, 2.0)));
        assert_eq!(kept.nodes, BTreeSet::from([NodeId(1)]));
        assert!(kept.edges.is_empty());
        let m = materialize_filter(&g, &kept);
        assert_eq!((m.node_count(), m.edge_count()), (1, 0));
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn vacuous_filter_keeps_all() {
        let g = complete(5);
        let kept = run(&g, FilterChain::default().then(FilterExpr::node(MeasureKey::Degree, Comparator::Ge, 0.0)));
        assert_eq!((kept.nodes.len(), kept.edges.len()), (5, 10));
    }

    #[test]
    fn k4_with_pendant() {
        let mut g = complete(4);
        let p = g.add_node(None, Attributes::new()).unwrap();
        g.add_edge(NodeId(0), p, 1.0, None).unwrap();
        let chain = FilterChain::default()
            .then(FilterExpr::node(MeasureKey::Kcore, Comparator::Ge, 3.0))
            .then(FilterExpr::node(MeasureKey::Triangles, Comparator::Ge, 3.0));
        let kept = run(&g, chain.clone());
        assert_eq!(kept.nodes, (0..4).map(NodeId).collect());
        assert_eq!(kept.edges.len(), 6);
        let rev = FilterChain::new(chain.filters.into_iter().rev().collect());
        assert_eq!(run(&g, rev), kept);
    }

    #[test]
    fn filter_errors() {
        let g = path(3);
        let cache = StatsCache::new();
        let chain = FilterChain::default().then(FilterExpr::node(MeasureKey::Kcore, Comparator::Ge, 1.0));
        assert_eq!(apply_filter(&g, &chain, &cache), Err(ExploreError::MeasureNotComputed(MeasureKey::Kcore)));
        assert_eq!(apply_filter(&g, &FilterChain::default(), &cache), Err(ExploreError::EmptyChain));
        let bad = FilterChain::default().then(FilterExpr::node(MeasureKey::EdgeTriangles, Comparator::Ge, 1.0));
        assert!(matches!(apply_filter(&g, &bad, &cache), Err(ExploreError::UnknownMeasure { .. })));
    }

    #[test]
    fn edge_filter() {
        let mut g = complete(3);
        let p = g.add_node(None, Attributes::new()).unwrap();
        g.add_edge(NodeId(0), p, 1.0, None).unwrap();
        let kept = run(&g, FilterChain::default().then(FilterExpr::edge(MeasureKey::EdgeTriangles, Comparator::Eq, 1.0)));
        assert_eq!(kept.edges.len(), 3);
        assert_eq!(kept.nodes.len(), 4);
    }

    #[test]
    fn filter_serialization() {
        let f: FilterExpr = serde_json::from_str(r#"{"target":"node","measure":"degree","op":">=","threshold":2}"#).unwrap();
        assert_eq!(f, FilterExpr::node(MeasureKey::Degree, Comparator::Ge, 2.0));
        let f: FilterExpr = serde_json::from_str(r#"{"target":"edge","measure":"triangle-core","op":"≤","threshold":1}"#).unwrap();
        assert_eq!(f.op, Comparator::Le);
    }

    #[test]
    fn unit_histograms() {
        let h = histogram(&[1.0, 2.0, 1.0], Binning::Unit).unwrap();
        assert_eq!(h.nonzero(), vec![(1.0, 2), (2.0, 1)]);
        let h = histogram(&[3.0, 1.0, 1.0, 1.0], Binning::Unit).unwrap();
        assert_eq!(h.nonzero(), vec![(1.0, 3), (3.0, 1)]);
        assert_eq!(h.counts.len() + 1, h.edges.len());
        assert_eq!(histogram(&[0.5], Binning::Unit), Err(ExploreError::NonIntegerValues));
        assert_eq!(histogram(&[], Binning::Unit), Err(ExploreError::EmptyValues));
    }

    #[test]
    fn constant_values_single_bin() {
        for v in [0.0, 7.0, -3.5, 1e6, 1e-9] {
            let h = histogram(&[v; 5], Binning::Count(4)).unwrap();
            assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
            assert_eq!(h.counts.iter().sum::<u64>(), 5);
            assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn equal_width_last_bin_closed() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0, 4.0], Binning::Count(4)).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1, 2]);
        assert_eq!(h.edges, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn cdf_examples() {
        let d = cdf_ccdf(&histogram(&[1.0, 2.0, 1.0], Binning::Unit).unwrap()).unwrap();
        let ys = |p: &[(f64, f64)]| p.iter().map(|x| x.1).collect::<Vec<_>>();
        assert_eq!(ys(&d.cdf), vec![2.0 / 3.0, 1.0]);
        assert_eq!(ys(&d.ccdf), vec![1.0, 1.0 / 3.0]);
        let d = cdf_ccdf(&histogram(&[5.0], Binning::Count(1)).unwrap()).unwrap();
        assert_eq!((ys(&d.cdf), ys(&d.ccdf)), (vec![1.0], vec![1.0]));
        let d = cdf_ccdf(&histogram(&[0.0, 1.0, 2.0, 3.0], Binning::Unit).unwrap()).unwrap();
        assert_eq!(ys(&d.cdf), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn top_k_rules() {
        let g = star(3);
        let deg: BTreeMap<NodeId, f64> = g.node_ids().map(|n| (n, g.degree(n) as f64)).collect();
        assert_eq!(top_k(&deg, 1).unwrap(), vec![(NodeId(0), 3.0)]);
        assert_eq!(top_k(&deg, 10).unwrap().len(), 4);
        let flat: BTreeMap<NodeId, f64> = (0..5).map(|i| (NodeId(i), 1.0)).collect();
        assert_eq!(top_k(&flat, 2).unwrap(), vec![(NodeId(0), 1.0), (NodeId(1), 1.0)]);
        assert!(top_k(&flat, 0).is_err());
    }

    #[test]
    fn sampling() {
        let g = complete(10);
        let s = sample(&g, SampleMethod::NodeInduced, 0.5, 3).unwrap();
        assert_eq!((s.node_count(), s.edge_count()), (5, 10));
        assert_eq!(s, sample(&g, SampleMethod::NodeInduced, 0.5, 3).unwrap());
        let all = sample(&g, SampleMethod::Edge, 1.0, 1).unwrap();
        assert_eq!((all.node_count(), all.edge_count()), (10, 45));
        let none = sample(&g, SampleMethod::NodeInduced, 0.0, 1).unwrap();
        assert!(none.is_empty());
        let e = sample(&g, SampleMethod::Edge, 0.1, 9).unwrap();
        assert_eq!(e.edge_count(), 5);
        assert!(sample(&g, SampleMethod::Edge, 1.5, 9).is_err());
    }

    #[test]
    fn text_search() {
        let mut g = Graph::new();
        for l in ["karp", "Kahn", "lee"] {
            g.add_node(Some(l.into()), Attributes::new()).unwrap();
        }
        g.add_node(None, Attributes::from([("org".into(), "Kalamazoo".into())])).unwrap();
        assert_eq!(search(&g, "KA"), vec![NodeId(0), NodeId(1), NodeId(3)]);
        assert_eq!(search(&g, "").len(), 4);
        assert!(search(&g, "zzz").is_empty());
    }

    fn temporal() -> Graph {
        let mut g = path(4);
        for (e, t) in [(0, 10), (1, 20), (2, 30)] {
            g.edge_mut(EdgeId(e)).unwrap().timestamp = Some(t);
        }
        let extra = g.add_node(None, Attributes::new()).unwrap();
        g.add_edge(NodeId(0), extra, 1.0, None).unwrap();
        g
    }

    #[test]
    fn windows() {
        let g = temporal();
        assert_eq!(time_window(&g, TimeWindow::new(10, 25).unwrap()).unwrap().edge_count(), 2);
        assert_eq!(time_window(&g, TimeWindow::new(0, 100).unwrap()).unwrap().edge_count(), 3);
        let w = time_window(&g, TimeWindow::new(0, 5).unwrap()).unwrap();
        assert_eq!((w.node_count(), w.edge_count()), (0, 0));
        assert_eq!(time_window(&path(3), TimeWindow { t0: 0, t1: 1 }), Err(ExploreError::NoTemporalData));
        assert!(TimeWindow::new(5, 5).is_err());
    }

    #[test]
    fn timelines() {
        let g = temporal();
        let h = timeline(&g, 10).unwrap();
        assert_eq!(h.edges, vec![10.0, 20.0, 30.0, 40.0]);
        assert_eq!(h.counts, vec![1, 1, 1]);
        assert_eq!(timeline(&g, 20).unwrap().counts, vec![3]);
        assert_eq!(timeline(&g, 1000).unwrap().counts, vec![3]);

        let mut flat = path(4);
        for e in 0..3 {
            flat.edge_mut(EdgeId(e)).unwrap().timestamp = Some(0);
        }
        assert_eq!(timeline(&flat, 1).unwrap().counts, vec![3]);
        assert_eq!(timeline(&path(2), 1), Err(ExploreError::NoTemporalData));
    }
}
