use std::collections::BTreeMap;

use super::{sorted_intersection_len, Indexed};
use crate::graph::Graph;
use crate::measure::{EdgeMeasure, MeasureKey, NodeMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCounts {
    pub nodes: NodeMeasure,
    pub edges: EdgeMeasure,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub local: NodeMeasure,
    pub global: f64,
    pub wedges: u64,
}

/// Per-edge triangle support `|N(u) ∩ N(v)|`, per-node triangle counts and the total.
pub fn triangle_counts(g: &Graph) -> TriangleCounts {
    let idx = Indexed::new(g);
    let mut per_node = vec![0u64; idx.len()];
    let mut per_edge = BTreeMap::new();
    for e in g.edges() {
        let (u, v) = (idx.index[&e.u], idx.index[&e.v]);
        let t = sorted_intersection_len(&idx.adj[u], &idx.adj[v]) as u64;
        per_edge.insert(e.id, t as f64);
        per_node[u] += t;
        per_node[v] += t;
    }
    // Each triangle at a node is seen once through each of its two incident edges.
    let per_node: Vec<u64> = per_node.into_iter().map(|t| t / 2).collect();
    let total = per_node.iter().sum::<u64>() / 3;
    TriangleCounts {
        nodes: NodeMeasure {
            measure: MeasureKey::Triangles,
            values: idx.ids.iter().zip(&per_node).map(|(&n, &t)| (n, t as f64)).collect(),
            exact: true,
        },
        edges: EdgeMeasure {
            measure: MeasureKey::EdgeTriangles,
            values: per_edge,
            exact: true,
        },
        total,
    }
}

/// `2·t / (d·(d−1))`, zero below degree 2.
pub fn local_clustering_value(triangles: u64, degree: u64) -> f64 {
    if degree < 2 {
        0.0
    } else {
        2.0 * triangles as f64 / (degree * (degree - 1)) as f64
    }
}

/// `3·T / wedges`, zero for wedge-free graphs.
pub fn global_clustering_value(total_triangles: u64, wedges: u64) -> f64 {
    if wedges == 0 {
        0.0
    } else {
        3.0 * total_triangles as f64 / wedges as f64
    }
}

pub fn clustering(g: &Graph, tri: &TriangleCounts) -> Clustering {
    let mut wedges = 0u64;
    let local = g
        .node_ids()
        .map(|n| {
            let d = g.degree(n) as u64;
            wedges += d * d.saturating_sub(1) / 2;
            (n, local_clustering_value(tri.nodes.get(n) as u64, d))
        })
        .collect();
    Clustering {
        local: NodeMeasure {
            measure: MeasureKey::LocalClustering,
            values: local,
            exact: true,
        },
        global: global_clustering_value(tri.total, wedges),
        wedges,
    }
}
