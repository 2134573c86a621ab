use super::{Indexed, sorted_intersection_len};
use crate::graph::{EdgeId, Graph};
use crate::measure::{EdgeMeasure, MeasureKey, NodeMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct CoreDecomposition {
    pub core: NodeMeasure,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCoreDecomposition {
    pub values: EdgeMeasure,
    pub max: u64,
}

/// Core numbers by bucket peeling (Batagelj–Zaversnik), O(V + E).
pub fn kcore(g: &Graph) -> CoreDecomposition {
    let idx = Indexed::new(g);
    let n = idx.len();
    let mut deg: Vec<usize> = idx.adj.iter().map(Vec::len).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // Nodes sorted by degree, with the start offset of each degree bucket.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        order[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &u in &idx.adj[v] {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }

    let max = deg.iter().copied().max().unwrap_or(0) as u64;
    CoreDecomposition {
        core: NodeMeasure {
            measure: MeasureKey::Kcore,
            values: idx.ids.iter().zip(&deg).map(|(&id, &d)| (id, d as f64)).collect(),
            exact: true,
        },
        max,
    }
}

/// Triangle-core numbers by edge peeling.
///
/// Edges are removed in order of their current triangle support; removing
/// `(u, v)` breaks every triangle `(u, v, w)` still present, lowering the support
/// of `(u, w)` and `(v, w)`. The core number of an edge is `2 + level`, where
/// level is the running maximum of the support at removal time, so a
/// triangle-free edge gets 2 and a lone triangle gets 3.
pub fn triangle_core(g: &Graph) -> TriangleCoreDecomposition {
    let idx = Indexed::new(g);
    let edges: Vec<(EdgeId, usize, usize)> = g
        .edges()
        .map(|e| {
            let (a, b) = (idx.index[&e.u], idx.index[&e.v]);
            (e.id, a.min(b), a.max(b))
        })
        .collect();
    // Neighbors sorted by index, each with the connecting edge.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); idx.len()];
    for (i, &(_, u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut removed = vec![false; edges.len()];
    // Edges (u, w) and (v, w) closing a triangle over (u, v), both still present.
    let closing = |u: usize, v: usize, removed: &[bool], out: &mut Vec<(usize, usize)>| {
        out.clear();
        let (a, b) = (&adj[u], &adj[v]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if !removed[a[i].1] && !removed[b[j].1] {
                        out.push((a[i].1, b[j].1));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    };

    let mut support: Vec<usize> = edges
        .iter()
        .map(|&(_, u, v)| sorted_intersection_len(&idx.adj[u], &idx.adj[v]))
        .collect();

    // Bucket queue: `order` holds edges sorted by support, `start[s]` is the
    // first slot of bucket `s` and `pos` inverts `order`.
    let top = support.iter().copied().max().unwrap_or(0);
    let mut start = vec![0usize; top + 2];
    for &s in &support {
        start[s + 1] += 1;
    }
    for s in 0..=top {
        start[s + 1] += start[s];
    }
    let mut order = vec![0usize; edges.len()];
    let mut pos = vec![0usize; edges.len()];
    {
        let mut next = start.clone();
        for (e, &s) in support.iter().enumerate() {
            pos[e] = next[s];
            order[next[s]] = e;
            next[s] += 1;
        }
    }

    let mut result = vec![0u64; edges.len()];
    let mut scratch = Vec::new();
    for i in 0..order.len() {
        let e = order[i];
        let s = support[e];
        result[e] = s as u64 + 2;
        removed[e] = true;
        let (_, u, v) = edges[e];
        closing(u, v, &removed, &mut scratch);
        for &(a, b) in &scratch {
            for x in [a, b] {
                // Supports at or below the current level no longer matter.
                let sx = support[x];
                if sx > s {
                    let first = start[sx];
                    let y = order[first];
                    order.swap(first, pos[x]);
                    pos[y] = pos[x];
                    pos[x] = first;
                    start[sx] += 1;
                    support[x] -= 1;
                }
            }
        }
    }

    let max = result.iter().copied().max().unwrap_or(0);
    TriangleCoreDecomposition {
        values: EdgeMeasure {
            measure: MeasureKey::TriangleCore,
            values: edges.iter().zip(&result).map(|(&(id, _, _), &k)| (id, k as f64)).collect(),
            exact: true,
        },
        max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;
    use crate::NodeId;

    #[test]
    fn kcore_examples() {
        let mut g = complete(4);
        let p = add_nodes(&mut g, 1)[0];
        g.add_edge(NodeId(0), p, 1.0, None).unwrap();
        let k = kcore(&g);
        assert_eq!(k.max, 3);
        for i in 0..4 {
            assert_eq!(k.core.get(NodeId(i)), 3.0);
        }
        assert_eq!(k.core.get(p), 1.0);

        let k = kcore(&complete(3));
        assert!(k.core.values.values().all(|&c| c == 2.0));

        let mut g = Graph::new();
        add_nodes(&mut g, 3);
        let k = kcore(&g);
        assert_eq!(k.max, 0);
        assert!(k.core.values.values().all(|&c| c == 0.0));
        assert_eq!(kcore(&Graph::new()).max, 0);
    }

    #[test]
    fn triangle_core_examples() {
        let t = triangle_core(&complete(3));
        assert_eq!(t.max, 3);
        assert!(t.values.values.values().all(|&k| k == 3.0));

        let t = triangle_core(&complete(4));
        assert_eq!(t.max, 4);
        assert!(t.values.values.values().all(|&k| k == 4.0));

        let t = triangle_core(&path(3));
        assert_eq!(t.max, 2);
        assert!(t.values.values.values().all(|&k| k == 2.0));

        assert_eq!(triangle_core(&Graph::new()).max, 0);
    }
}
