use std::collections::VecDeque;

use super::{Indexed, Sampling};
use crate::graph::Graph;
use crate::measure::{MeasureKey, NodeMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct Distances {
    /// Within-component eccentricity; isolated nodes get 0.
    pub eccentricity: NodeMeasure,
    pub diameter: f64,
    /// Mean over connected pairs only; 0 when no pair is connected.
    pub mean_distance: f64,
    pub component_count: usize,
}

fn bfs(adj: &[Vec<usize>], s: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.fill(usize::MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
}

fn component_count(adj: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut stack = Vec::new();
    let mut count = 0;
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Unweighted BFS distances. With sampling, eccentricities of non-source nodes
/// are the largest distance to any sampled source in their component (a lower
/// bound) and the mean is taken over source pairs.
pub fn distances(g: &Graph, sampling: &Sampling) -> Distances {
    let idx = Indexed::new(g);
    let n = idx.len();
    let sources = sampling.sources_for(n);
    let exact = sources.len() == n;

    let mut ecc = vec![0usize; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut sum = 0u128;
    let mut pairs = 0u128;
    for &s in &sources {
        bfs(&idx.adj, s, &mut dist, &mut queue);
        for v in 0..n {
            let d = dist[v];
            if d == usize::MAX || v == s {
                continue;
            }
            sum += d as u128;
            pairs += 1;
            ecc[s] = ecc[s].max(d);
            if !exact {
                ecc[v] = ecc[v].max(d);
            }
        }
    }

    let diameter = ecc.iter().copied().max().unwrap_or(0) as f64;
    let mean_distance = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
    Distances {
        eccentricity: NodeMeasure {
            measure: MeasureKey::Eccentricity,
            values: idx.ids.iter().zip(&ecc).map(|(&id, &e)| (id, e as f64)).collect(),
            exact,
        },
        diameter,
        mean_distance,
        component_count: component_count(&idx.adj),
    }
}
