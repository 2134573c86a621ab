//! Micro and macro network measures.
//!
//! Every measure is defined on the underlying undirected simple graph and
//! ignores edge weights.

mod centrality;
mod coloring;
mod cores;
mod distances;
mod summary;
mod triangles;

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub use centrality::{betweenness, pagerank, PageRank, PageRankParams};
pub use coloring::{greedy_color, Coloring};
pub use cores::{kcore, triangle_core, CoreDecomposition, TriangleCoreDecomposition};
pub use distances::{distances, Distances};
pub use summary::{aggregate, macro_summary, Aggregates, MacroSummary};
pub use triangles::{
    clustering, global_clustering_value, local_clustering_value, triangle_counts, Clustering, TriangleCounts,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("sample count must be positive")]
    NonPositiveSampleCount,
    #[error("damping must lie strictly between 0 and 1, got {0}")]
    InvalidDamping(f64),
}

/// Source sampling policy for the BFS-based measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    /// Requested number of sources; `None` always runs exactly.
    pub sources: Option<usize>,
    /// Graphs with at most this many nodes are always computed exactly.
    pub exact_threshold: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn exact() -> Self {
        Self {
            sources: None,
            exact_threshold: usize::MAX,
            seed: 0,
        }
    }

    /// Sample `sources` nodes regardless of graph size.
    pub fn sampled(sources: usize, seed: u64) -> Self {
        Self {
            sources: Some(sources),
            exact_threshold: 0,
            seed,
        }
    }

    /// Number of sources that will actually be sampled on an `n`-node graph,
    /// or `None` when the computation is exact.
    pub fn effective_sources(&self, n: usize) -> Option<usize> {
        match self.sources {
            Some(k) if n > self.exact_threshold && k < n => Some(k),
            _ => None,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), AnalyticsError> {
        if self.sources == Some(0) {
            return Err(AnalyticsError::NonPositiveSampleCount);
        }
        Ok(())
    }

    /// Ascending dense indices of the BFS sources.
    pub(crate) fn sources_for(&self, n: usize) -> Vec<usize> {
        match self.effective_sources(n) {
            None => (0..n).collect(),
            Some(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut picked = index::sample(&mut rng, n, k).into_vec();
                picked.sort_unstable();
                picked
            }
        }
    }
}

/// Dense, sorted adjacency snapshot. Index order equals ascending node-id order.
pub(crate) struct Indexed {
    pub ids: Vec<NodeId>,
    pub index: HashMap<NodeId, usize>,
    pub adj: Vec<Vec<usize>>,
}

impl Indexed {
    pub fn new(g: &Graph) -> Self {
        let ids: Vec<NodeId> = g.node_ids().collect();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let adj = ids
            .iter()
            .map(|&n| g.neighbors(n).map(|(m, _)| index[&m]).collect())
            .collect();
        Self { ids, index, adj }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Size of the intersection of two ascending slices.
pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
