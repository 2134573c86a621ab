//! Linear-time partitioning: communities, structural roles and coloring.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{self, Indexed};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMethod {
    Community,
    Role,
    Coloring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Partition {
    pub method: PartitionMethod,
    /// Dense group ids `0..group_count`.
    pub assignment: BTreeMap<NodeId, usize>,
    pub group_count: usize,
    /// Modularity, for community partitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("role count must be at least 1")]
    ZeroRoles,
    #[error("role count {requested} exceeds node count {nodes}")]
    TooManyRoles { requested: usize, nodes: usize },
}

/// Relabels groups densely in order of first appearance by ascending node id.
fn densify(method: PartitionMethod, ids: &[NodeId], raw: &[usize]) -> Partition {
    let mut remap = HashMap::new();
    let assignment: BTreeMap<NodeId, usize> = ids
        .iter()
        .zip(raw)
        .map(|(&id, r)| {
            let next = remap.len();
            (id, *remap.entry(*r).or_insert(next))
        })
        .collect();
    Partition {
        method,
        assignment,
        group_count: remap.len(),
        quality: None,
    }
}

pub fn count_groups(p: &Partition) -> usize {
    p.group_count
}

/// Newman modularity of an assignment; 0 for an edgeless graph.
pub fn modularity(g: &Graph, assignment: &BTreeMap<NodeId, usize>) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let mut internal: HashMap<usize, f64> = HashMap::new();
    let mut degree_sum: HashMap<usize, f64> = HashMap::new();
    for e in g.edges() {
        if assignment[&e.u] == assignment[&e.v] {
            *internal.entry(assignment[&e.u]).or_default() += 1.0;
        }
    }
    for n in g.node_ids() {
        *degree_sum.entry(assignment[&n]).or_default() += g.degree(n) as f64;
    }
    let mut groups: Vec<usize> = degree_sum.keys().copied().collect();
    groups.sort_unstable();
    groups
        .into_iter()
        .map(|c| {
            let l = internal.get(&c).copied().unwrap_or(0.0);
            let d = degree_sum[&c];
            l / m - (d / (2.0 * m)).powi(2)
        })
        .sum()
}

/// Asynchronous label propagation.
///
/// Every node starts with its own distinct label, assigned in seeded order; each sweep visits nodes in a seeded
/// shuffled order and moves each to the most frequent label among its
/// neighbors, smallest label on ties. Stops after a sweep with no change or
/// after `max_sweeps` sweeps.
pub fn communities_label_propagation(g: &Graph, seed: u64, max_sweeps: usize) -> Partition {
    let idx = Indexed::new(g);
    let n = idx.len();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Distinct initial labels in seeded order, so the smallest-label tie rule
    // does not favour low node ids.
    labels.shuffle(&mut rng);
    let mut counts: HashMap<usize, usize> = HashMap::new();

    for _ in 0..max_sweeps {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            if idx.adj[v].is_empty() {
                continue;
            }
            counts.clear();
            for &w in &idx.adj[v] {
                *counts.entry(labels[w]).or_default() += 1;
            }
            let best = counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(&l, _)| l)
                .expect("nonempty neighborhood");
            if best != labels[v] {
                labels[v] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut p = densify(PartitionMethod::Community, &idx.ids, &labels);
    p.quality = Some(modularity(g, &p.assignment));
    p
}

/// Structural feature vector of every node, columns standardized.
///
/// Features: `ln(1+deg)`, `ln(1+triangles)`, `ln(1+wedges)`, core number,
/// `ln(1+mean neighbor degree)`.
pub fn role_features(g: &Graph) -> Vec<[f64; 5]> {
    let tri = analytics::triangle_counts(g);
    let core = analytics::kcore(g);
    let mut rows: Vec<[f64; 5]> = g
        .node_ids()
        .map(|n| {
            let d = g.degree(n) as f64;
            let nbr_deg: usize = g.neighbors(n).map(|(m, _)| g.degree(m)).sum();
            let mean_nbr = if d > 0.0 { nbr_deg as f64 / d } else { 0.0 };
            [
                d.ln_1p(),
                tri.nodes.get(n).ln_1p(),
                (d * (d - 1.0).max(0.0) / 2.0).ln_1p(),
                core.core.get(n),
                mean_nbr.ln_1p(),
            ]
        })
        .collect();
    for c in 0..5 {
        let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        let mean = order_free_mean(&col);
        let var = order_free_mean(&col.iter().map(|x| (x - mean) * (x - mean)).collect::<Vec<_>>());
        let sd = var.sqrt();
        for r in rows.iter_mut() {
            r[c] = if sd > 1e-12 { (r[c] - mean) / sd } else { 0.0 };
        }
    }
    rows
}

/// Mean whose rounding does not depend on input order.
fn order_free_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

fn dist2(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lex_cmp(a: &[f64; 5], b: &[f64; 5]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Role discovery by Lloyd refinement over [`role_features`].
///
/// Initial centroids: a seeded pick among the distinct feature vectors, then
/// repeatedly the point farthest from all chosen centroids. Every choice and
/// tie-break goes through the feature vectors alone, so the result is
/// invariant under node relabeling.
pub fn roles(g: &Graph, role_count: usize, seed: u64) -> Result<Partition, PartitionError> {
    let n = g.node_count();
    if role_count == 0 {
        return Err(PartitionError::ZeroRoles);
    }
    if role_count > n {
        return Err(PartitionError::TooManyRoles {
            requested: role_count,
            nodes: n,
        });
    }
    let ids: Vec<NodeId> = g.node_ids().collect();
    let feats = role_features(g);

    let mut distinct = feats.clone();
    distinct.sort_by(lex_cmp);
    distinct.dedup_by(|a, b| lex_cmp(a, b).is_eq());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = vec![distinct[rng.random_range(0..distinct.len())]];
    while centroids.len() < role_count.min(distinct.len()) {
        let far = distinct
            .iter()
            .map(|p| (p, centroids.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(b.0, a.0)))
            .map(|(p, _)| *p)
            .unwrap();
        centroids.push(far);
    }

    let nearest = |p: &[f64; 5], centroids: &[[f64; 5]]| {
        centroids
            .iter()
            .enumerate()
            .map(|(i, c)| (i, dist2(p, c)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&centroids[a.0], &centroids[b.0])))
            .map(|(i, _)| i)
            .unwrap()
    };
    let mut assign: Vec<usize> = feats.iter().map(|p| nearest(p, &centroids)).collect();
    for _ in 0..100 {
        for (k, c) in centroids.iter_mut().enumerate() {
            let members: Vec<&[f64; 5]> = feats.iter().zip(&assign).filter(|(_, &a)| a == k).map(|(p, _)| p).collect();
            if members.is_empty() {
                continue;
            }
            for d in 0..5 {
                c[d] = order_free_mean(&members.iter().map(|p| p[d]).collect::<Vec<_>>());
            }
        }
        let next: Vec<usize> = feats.iter().map(|p| nearest(p, &centroids)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }

    Ok(densify(PartitionMethod::Role, &ids, &assign))
}

/// Coloring as a partition (color classes are groups).
pub fn coloring(g: &Graph) -> Partition {
    let c = analytics::greedy_color(g);
    let ids: Vec<NodeId> = c.colors.values.keys().copied().collect();
    let raw: Vec<usize> = c.colors.values.values().map(|&x| x as usize).collect();
    densify(PartitionMethod::Coloring, &ids, &raw)
}
