use std::collections::BTreeSet;

use super::Indexed;
use crate::graph::Graph;
use crate::measure::{MeasureKey, NodeMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct Coloring {
    pub colors: NodeMeasure,
    pub count: u64,
}

/// Smallest-last (degeneracy) ordering: repeatedly removes a minimum-degree
/// node, smallest id on ties, then colors in reverse removal order.
pub(crate) fn smallest_last_order(idx: &Indexed) -> Vec<usize> {
    let n = idx.len();
    let mut deg: Vec<usize> = idx.adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut heap: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = heap.pop_first() {
        removed[v] = true;
        order.push(v);
        for &w in &idx.adj[v] {
            if !removed[w] {
                heap.remove(&(deg[w], w));
                deg[w] -= 1;
                heap.insert((deg[w], w));
            }
        }
    }
    order.reverse();
    order
}

/// Greedy coloring in smallest-last order. Uses at most degeneracy + 1 colors.
pub fn greedy_color(g: &Graph) -> Coloring {
    let idx = Indexed::new(g);
    let n = idx.len();
    let mut color = vec![usize::MAX; n];
    let mut used = Vec::new();
    for v in smallest_last_order(&idx) {
        used.clear();
        used.resize(idx.adj[v].len() + 1, false);
        for &w in &idx.adj[v] {
            if color[w] < used.len() {
                used[color[w]] = true;
            }
        }
        color[v] = used.iter().position(|&u| !u).expect("a free color always exists");
    }
    let count = color.iter().map(|&c| c as u64 + 1).max().unwrap_or(0);
    Coloring {
        colors: NodeMeasure {
            measure: MeasureKey::Color,
            values: idx.ids.iter().zip(&color).map(|(&id, &c)| (id, c as f64)).collect(),
            exact: true,
        },
        count,
    }
}
