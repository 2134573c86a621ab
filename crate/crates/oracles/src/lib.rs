//! Slow, obviously-correct reference implementations.
//!
//! Everything here works from the definitions with no shared code paths into
//! `graphvis-core` beyond reading the graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use graphvis_core::{Attributes, EdgeId, Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Adjacency = BTreeMap<NodeId, BTreeSet<NodeId>>;

pub fn adjacency(g: &Graph) -> Adjacency {
    let mut adj: Adjacency = g.node_ids().map(|id| (id, BTreeSet::new())).collect();
    for e in g.edges() {
        adj.get_mut(&e.u).unwrap().insert(e.v);
        adj.get_mut(&e.v).unwrap().insert(e.u);
    }
    adj
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangles {
    pub nodes: BTreeMap<NodeId, u64>,
    pub edges: BTreeMap<EdgeId, u64>,
    pub total: u64,
}

/// Enumerates every 3-subset of nodes.
pub fn triangles(g: &Graph) -> Triangles {
    let adj = adjacency(g);
    let ids: Vec<NodeId> = g.node_ids().collect();
    let mut nodes: BTreeMap<NodeId, u64> = ids.iter().map(|&v| (v, 0)).collect();
    let mut pairs: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    let mut total = 0;
    for (i, &a) in ids.iter().enumerate() {
        for (j, &b) in ids.iter().enumerate().skip(i + 1) {
            if !adj[&a].contains(&b) {
                continue;
            }
            for &c in &ids[j + 1..] {
                if adj[&a].contains(&c) && adj[&b].contains(&c) {
                    total += 1;
                    for v in [a, b, c] {
                        *nodes.get_mut(&v).unwrap() += 1;
                    }
                    for p in [(a, b), (a, c), (b, c)] {
                        *pairs.entry(p).or_default() += 1;
                    }
                }
            }
        }
    }
    let edges = g
        .edges()
        .map(|e| (e.id, pairs.get(&(e.u.min(e.v), e.u.max(e.v))).copied().unwrap_or(0)))
        .collect();
    Triangles { nodes, edges, total }
}

/// Number of paths of length two.
pub fn wedges(g: &Graph) -> u64 {
    adjacency(g).values().map(|n| (n.len() as u64) * (n.len() as u64).saturating_sub(1) / 2).sum()
}

/// Core numbers by searching every node subset; practical for n <= 16.
pub fn kcore_exhaustive(g: &Graph) -> BTreeMap<NodeId, u64> {
    let ids: Vec<NodeId> = g.node_ids().collect();
    let n = ids.len();
    assert!(n <= 20, "exhaustive core search is exponential");
    let adj = adjacency(g);
    let masks: Vec<u32> = ids
        .iter()
        .map(|v| ids.iter().enumerate().filter(|(_, w)| adj[v].contains(w)).fold(0u32, |m, (i, _)| m | (1 << i)))
        .collect();
    let mut core = vec![0u64; n];
    for s in 1u32..(1u32 << n) {
        let min_deg = (0..n).filter(|i| s & (1 << i) != 0).map(|i| (masks[i] & s).count_ones()).min().unwrap() as u64;
        for (i, c) in core.iter_mut().enumerate() {
            if s & (1 << i) != 0 {
                *c = (*c).max(min_deg);
            }
        }
    }
    ids.into_iter().zip(core).collect()
}

/// Core numbers from the definition: for each k, delete nodes of degree < k
/// until none remain, recomputing degrees from scratch each round.
pub fn kcore_naive(g: &Graph) -> BTreeMap<NodeId, u64> {
    let adj = adjacency(g);
    let mut core: BTreeMap<NodeId, u64> = g.node_ids().map(|v| (v, 0)).collect();
    let mut k = 1;
    loop {
        let mut alive: BTreeSet<NodeId> = g.node_ids().collect();
        loop {
            let drop: Vec<NodeId> = alive.iter().copied().filter(|v| adj[v].intersection(&alive).count() < k).collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive.remove(&v);
            }
        }
        if alive.is_empty() {
            return core;
        }
        for v in alive {
            core.insert(v, k as u64);
        }
        k += 1;
    }
}

/// Triangle-core numbers: for each k, delete edges supported by fewer than
/// k - 2 triangles of the remaining subgraph until none remain. Every edge
/// lies in the k = 2 subgraph.
pub fn triangle_core(g: &Graph) -> BTreeMap<EdgeId, u64> {
    let mut result: BTreeMap<EdgeId, u64> = g.edge_ids().map(|e| (e, 2)).collect();
    let mut k = 3;
    loop {
        let mut alive: BTreeSet<EdgeId> = g.edge_ids().collect();
        loop {
            let mut adj: Adjacency = BTreeMap::new();
            for &e in &alive {
                let r = g.edge(e).unwrap();
                adj.entry(r.u).or_default().insert(r.v);
                adj.entry(r.v).or_default().insert(r.u);
            }
            let drop: Vec<EdgeId> = alive
                .iter()
                .copied()
                .filter(|&e| {
                    let r = g.edge(e).unwrap();
                    (adj[&r.u].intersection(&adj[&r.v]).count() as u64) < k - 2
                })
                .collect();
            if drop.is_empty() {
                break;
            }
            for e in drop {
                alive.remove(&e);
            }
        }
        if alive.is_empty() {
            return result;
        }
        for e in alive {
            result.insert(e, k);
        }
        k += 1;
    }
}

/// All-pairs hop distances; `None` for unreachable pairs.
pub fn all_pairs(g: &Graph) -> BTreeMap<(NodeId, NodeId), Option<u64>> {
    let ids: Vec<NodeId> = g.node_ids().collect();
    let n = ids.len();
    let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0u64);
    }
    for e in g.edges() {
        let (a, b) = (pos[&e.u], pos[&e.v]);
        d[a][b] = Some(1);
        d[b][a] = Some(1);
    }
    // Floyd-Warshall.
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            out.insert((ids[i], ids[j]), d[i][j]);
        }
    }
    out
}

/// Number of shortest paths between every ordered pair, by explicit path
/// enumeration with depth-first search.
fn shortest_path_counts(g: &Graph, dist: &BTreeMap<(NodeId, NodeId), Option<u64>>) -> BTreeMap<(NodeId, NodeId), Vec<Vec<NodeId>>> {
    let adj = adjacency(g);
    let mut out = BTreeMap::new();
    for s in g.node_ids() {
        for t in g.node_ids() {
            if s >= t {
                continue;
            }
            let Some(target) = dist[&(s, t)] else { continue };
            let mut paths = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let last = *p.last().unwrap();
                if last == t {
                    paths.push(p);
                    continue;
                }
                let here = p.len() as u64 - 1;
                for &w in &adj[&last] {
                    if dist[&(s, w)] == Some(here + 1) && dist[&(w, t)] == Some(target - here - 1) {
                        let mut q = p.clone();
                        q.push(w);
                        stack.push(q);
                    }
                }
            }
            out.insert((s, t), paths);
        }
    }
    out
}

/// Unnormalized betweenness over unordered pairs, from the list of every
/// shortest path.
pub fn betweenness(g: &Graph) -> BTreeMap<NodeId, f64> {
    let dist = all_pairs(g);
    let mut b: BTreeMap<NodeId, f64> = g.node_ids().map(|v| (v, 0.0)).collect();
    for paths in shortest_path_counts(g, &dist).values() {
        let total = paths.len() as f64;
        for p in paths {
            for v in &p[1..p.len() - 1] {
                *b.get_mut(v).unwrap() += 1.0 / total;
            }
        }
    }
    b
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSummary {
    pub eccentricity: BTreeMap<NodeId, u64>,
    pub diameter: u64,
    pub mean_distance: f64,
    pub component_count: usize,
}

pub fn distance_summary(g: &Graph) -> DistanceSummary {
    let dist = all_pairs(g);
    let mut ecc: BTreeMap<NodeId, u64> = g.node_ids().map(|v| (v, 0)).collect();
    let (mut sum, mut pairs) = (0u64, 0u64);
    for (&(s, t), d) in &dist {
        if let Some(d) = *d {
            let e = ecc.get_mut(&s).unwrap();
            *e = (*e).max(d);
            if s < t {
                sum += d;
                pairs += 1;
            }
        }
    }
    DistanceSummary {
        diameter: ecc.values().copied().max().unwrap_or(0),
        eccentricity: ecc,
        mean_distance: if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 },
        component_count: components(g).len(),
    }
}

/// Connected components by breadth-first search, each sorted.
pub fn components(g: &Graph) -> Vec<BTreeSet<NodeId>> {
    let adj = adjacency(g);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in g.node_ids() {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    comp.insert(w);
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// PageRank of a star with `leaves` leaves: `(center, leaf)`, from the
/// closed-form solution of the two-class fixed point.
pub fn star_pagerank(leaves: usize, damping: f64) -> (f64, f64) {
    let k = leaves as f64;
    let n = k + 1.0;
    let center = (1.0 + damping * k) / (n * (1.0 + damping));
    (center, (1.0 - center) / k)
}

/// True when no edge joins two nodes with the same color.
pub fn is_proper_coloring(g: &Graph, color: &BTreeMap<NodeId, usize>) -> bool {
    g.edges().all(|e| color[&e.u] != color[&e.v])
}

/// True when every group lies inside a single connected component.
pub fn refines_components(g: &Graph, assignment: &BTreeMap<NodeId, usize>) -> bool {
    let mut comp_of = BTreeMap::new();
    for (i, c) in components(g).into_iter().enumerate() {
        for v in c {
            comp_of.insert(v, i);
        }
    }
    let mut group_comp: BTreeMap<usize, usize> = BTreeMap::new();
    assignment.iter().all(|(v, grp)| *group_comp.entry(*grp).or_insert(comp_of[v]) == comp_of[v])
}

/// Labeled isomorphism: a bijection that preserves labels, adjacency and edge
/// weights. Backtracks over nodes with equal label and degree.
pub fn isomorphic_labeled(a: &Graph, b: &Graph) -> bool {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() || a.is_directed() != b.is_directed() {
        return false;
    }
    let weights = |g: &Graph| -> BTreeMap<(NodeId, NodeId), f64> {
        g.edges().flat_map(|e| [((e.u, e.v), e.weight), ((e.v, e.u), e.weight)]).collect()
    };
    let (wa, wb) = (weights(a), weights(b));
    let (adj_a, adj_b) = (adjacency(a), adjacency(b));
    let key = |g: &Graph, adj: &Adjacency, v: NodeId| (g.node(v).unwrap().label.clone(), adj[&v].len());
    let order: Vec<NodeId> = {
        // Most constrained first: rare signatures, then neighbors of chosen nodes.
        let mut count: BTreeMap<(String, usize), usize> = BTreeMap::new();
        for v in a.node_ids() {
            *count.entry(key(a, &adj_a, v)).or_default() += 1;
        }
        let mut ids: Vec<NodeId> = a.node_ids().collect();
        ids.sort_by_key(|&v| (count[&key(a, &adj_a, v)], v));
        ids
    };
    let mut candidates: BTreeMap<(String, usize), Vec<NodeId>> = BTreeMap::new();
    for v in b.node_ids() {
        candidates.entry(key(b, &adj_b, v)).or_default().push(v);
    }
    if a.node_ids().any(|v| !candidates.contains_key(&key(a, &adj_a, v))) {
        return false;
    }

    fn extend(
        i: usize,
        order: &[NodeId],
        cands: &[Vec<NodeId>],
        adj_a: &Adjacency,
        wa: &BTreeMap<(NodeId, NodeId), f64>,
        wb: &BTreeMap<(NodeId, NodeId), f64>,
        map: &mut BTreeMap<NodeId, NodeId>,
        used: &mut BTreeSet<NodeId>,
    ) -> bool {
        let Some(&v) = order.get(i) else { return true };
        for &c in &cands[i] {
            if used.contains(&c) {
                continue;
            }
            let consistent = map.iter().all(|(&u, &mu)| {
                let ea = adj_a[&v].contains(&u).then(|| wa[&(v, u)]);
                let eb = wb.get(&(c, mu)).copied();
                ea.map(f64::to_bits) == eb.map(f64::to_bits)
            });
            if !consistent {
                continue;
            }
            map.insert(v, c);
            used.insert(c);
            if extend(i + 1, order, cands, adj_a, wa, wb, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&c);
        }
        false
    }

    let cands: Vec<Vec<NodeId>> = order.iter().map(|&v| candidates[&key(a, &adj_a, v)].clone()).collect();
    extend(0, &order, &cands, &adj_a, &wa, &wb, &mut BTreeMap::new(), &mut BTreeSet::new())
}

/// G(n, p) by independent coin flips over every pair; labels are the
/// node ids.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    let ids: Vec<NodeId> = (0..n).map(|_| g.add_node(None, Attributes::new()).unwrap()).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.add_edge(ids[i], ids[j], 1.0, None).unwrap();
            }
        }
    }
    g
}

/// A random simple graph with up to `max_n` nodes and a random density, so
/// that sparse, dense and edgeless graphs all occur.
pub fn random_graph(max_n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0c0f_fee0);
    let n = rng.random_range(0..=max_n);
    let p = match rng.random_range(0..4) {
        0 => rng.random_range(0.0..0.1),
        1 => rng.random_range(0.1..0.4),
        2 => rng.random_range(0.4..0.9),
        _ => 1.0,
    };
    gnp(n, p, rng.random())
}


/// Proptest strategies for simple graphs.
pub mod strategies {
    use std::collections::BTreeSet;

    use graphvis_core::{Attributes, Graph, NodeId};
    use proptest::prelude::*;

    /// Graph on `n` nodes from a list of node-index pairs; loops and
    /// duplicates are dropped.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new();
        for _ in 0..n {
            g.add_node(None, Attributes::new()).unwrap();
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a != b && seen.insert((a, b)) {
                g.add_edge(NodeId(a as u64), NodeId(b as u64), 1.0, None).unwrap();
            }
        }
        g
    }

    /// Simple graphs with up to `max_n` nodes; the edge budget ranges from
    /// empty to roughly complete.
    pub fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (0..=max_n).prop_flat_map(|n| {
            let pairs = n * n.saturating_sub(1) / 2;
            let pair = (0..n.max(1), 0..n.max(1));
            proptest::collection::vec(pair, 0..=pairs.max(1) * 2).prop_map(move |ps| from_pairs(n, &ps))
        })
    }
}

/// Random mutation workloads and the cache-versus-recomputation check.
pub mod mutations {
    use graphvis_core::mutation::{AttrTarget, Endpoint, NewEdge, NewNode};
    use graphvis_core::{apply_batch, apply_mutation, AttrValue, Attributes, ComputeOptions, EdgeId, Graph, MeasureKey, Mutation, NodeId, StatsCache};
    use rand::seq::IteratorRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pick_node(g: &Graph, rng: &mut impl Rng) -> NodeId {
        g.node_ids().choose(rng).unwrap_or(NodeId(0))
    }

    fn pick_edge(g: &Graph, rng: &mut impl Rng) -> EdgeId {
        g.edge_ids().choose(rng).unwrap_or(EdgeId(0))
    }

    /// A mutation against `g`; roughly one in eight is invalid on purpose.
    pub fn random_mutation(g: &Graph, rng: &mut impl Rng) -> Mutation {
        let missing_node = NodeId(g.next_node_id().0 + 7);
        match rng.random_range(0..16) {
            0 | 1 => Mutation::InsertNode {
                label: rng.random_bool(0.5).then(|| format!("n{}", rng.random::<u16>())),
                attrs: Attributes::new(),
                timestamp: rng.random_bool(0.3).then(|| rng.random_range(0..1000)),
            },
            2..=6 => Mutation::InsertEdge {
                u: pick_node(g, rng),
                v: pick_node(g, rng),
                weight: rng.random_range(1..5) as f64,
                timestamp: rng.random_bool(0.3).then(|| rng.random_range(0..1000)),
            },
            7 | 8 => Mutation::DeleteEdge { id: pick_edge(g, rng) },
            9 => Mutation::DeleteNode { id: pick_node(g, rng) },
            10 | 11 => {
                let k = rng.random_range(1..4);
                let nodes = vec![NewNode::default(); k];
                let mut edges = Vec::new();
                for i in 1..k {
                    edges.push(NewEdge { u: Endpoint::New(i - 1), v: Endpoint::New(i), weight: 1.0, timestamp: None });
                }
                if g.node_count() > 0 {
                    edges.push(NewEdge { u: Endpoint::New(0), v: Endpoint::Node(pick_node(g, rng)), weight: 1.0, timestamp: None });
                    if k > 1 && rng.random_bool(0.5) {
                        edges.push(NewEdge { u: Endpoint::Node(pick_node(g, rng)), v: Endpoint::New(k - 1), weight: 2.0, timestamp: None });
                    }
                }
                Mutation::InsertSubgraph { nodes, edges }
            }
            12 | 13 => {
                let target = if rng.random_bool(0.5) && g.edge_count() > 0 {
                    AttrTarget::Edge(pick_edge(g, rng))
                } else {
                    AttrTarget::Node(pick_node(g, rng))
                };
                Mutation::UpdateAttrs {
                    target,
                    label: rng.random_bool(0.3).then(|| "renamed".to_owned()),
                    weight: matches!(target, AttrTarget::Edge(_)).then(|| rng.random_range(1..9) as f64),
                    set: Attributes::from([("k".to_owned(), AttrValue::Number(rng.random_range(0..3) as f64))]),
                    remove: Vec::new(),
                }
            }
            14 => Mutation::DeleteNode { id: missing_node },
            _ => Mutation::insert_edge(pick_node(g, rng), missing_node),
        }
    }

    /// Every fresh entry must be current and equal to a full recomputation.
    pub fn check_cache(g: &Graph, cache: &StatsCache, opts: &ComputeOptions) -> Result<(), String> {
        // One computation yields a whole group of keys; reuse it for the rest.
        let mut recomputed = std::collections::BTreeMap::new();
        for (key, entry) in cache.entries() {
            if !entry.fresh {
                continue;
            }
            if entry.computed_at != g.version() {
                return Err(format!("{key}: fresh entry from version {} at version {}", entry.computed_at, g.version()));
            }
            if !recomputed.contains_key(&key) {
                let full = StatsCache::compute(g, key, opts).map_err(|e| e.to_string())?;
                recomputed.extend(full.entries);
            }
            let want = recomputed.get(&key).ok_or(format!("{key}: not recomputed"))?;
            if want.values != entry.values {
                return Err(format!("{key}: cached {:?} but recomputed {:?}", entry.values, want.values));
            }
        }
        Ok(())
    }

    /// Runs `steps` random mutations (single or batched) against a random
    /// graph of at most `max_n` nodes, checking the cache after each.
    pub fn run_sequence(seed: u64, max_n: usize, steps: usize) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = crate::random_graph(max_n, rng.random());
        let opts = ComputeOptions::default();
        let mut cache = StatsCache::for_graph(&g);
        for &key in MeasureKey::ALL {
            cache.ensure(&g, key, &opts).map_err(|e| e.to_string())?;
        }
        check_cache(&g, &cache, &opts)?;
        for step in 0..steps {
            let (before_g, before_c) = (g.clone(), cache.clone());
            let failed = if rng.random_bool(0.2) {
                let batch: Vec<Mutation> = (0..rng.random_range(1..5)).map(|_| random_mutation(&g, &mut rng)).collect();
                apply_batch(&mut g, &mut cache, &batch).is_err()
            } else {
                let m = random_mutation(&g, &mut rng);
                apply_mutation(&mut g, &mut cache, &m).is_err()
            };
            if failed && (g != before_g || cache != before_c) {
                return Err(format!("step {step}: rejected mutation modified state"));
            }
            if rng.random_bool(0.15) {
                let key = *MeasureKey::ALL.iter().choose(&mut rng).unwrap();
                cache.ensure(&g, key, &opts).map_err(|e| e.to_string())?;
            }
            check_cache(&g, &cache, &opts).map_err(|e| format!("seed {seed} step {step}: {e}"))?;
        }
        Ok(())
    }
}

/// Graphs carrying everything the file formats can express.
pub mod labeled {
    use std::collections::BTreeSet;

    use graphvis_core::mutation::AttrTarget;
    use graphvis_core::{apply_mutation, AttrValue, Attributes, Graph, Mutation, NodeId, StatsCache};
    use rand::seq::IndexedRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Label characters: letters, digits, spaces and the punctuation that
    /// the formats treat specially (comment, quote, markup and separators).
    const ALPHABET: &[char] = &[
        'a', 'b', 'k', 'x', 'Z', '0', '1', '7', ' ', '_', '-', '.', ',', ';', ':', '#', '%', '*', '<', '>', '&', '\'', '[', ']', 'é', 'ß', '中',
    ];

    const WEIGHTS: &[f64] = &[1.0, 2.0, 0.5, 0.125, 3.75, 1e-3, 12345.678, 0.1];

    pub fn random_label(rng: &mut impl Rng) -> String {
        let len = rng.random_range(1..=10);
        (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
    }

    /// Random simple undirected graph with unique labels, random weights,
    /// optional timestamps and a few typed attributes.
    pub fn random_labeled_graph(max_n: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(0..=max_n);
        let p = rng.random_range(0.0..0.3);
        let mut g = Graph::new();
        let mut cache = StatsCache::new();
        let mut labels = BTreeSet::new();
        let mut apply = |g: &mut Graph, m: Mutation| apply_mutation(g, &mut cache, &m).unwrap();
        for _ in 0..n {
            let label = loop {
                let l = random_label(&mut rng);
                if labels.insert(l.clone()) {
                    break l;
                }
            };
            let mut attrs = Attributes::new();
            if rng.random_bool(0.3) {
                attrs.insert("score".into(), AttrValue::Number(*WEIGHTS.choose(&mut rng).unwrap()));
            }
            if rng.random_bool(0.2) {
                attrs.insert("group".into(), AttrValue::Text(random_label(&mut rng)));
            }
            if rng.random_bool(0.2) {
                attrs.insert("flag".into(), AttrValue::Bool(rng.random()));
            }
            let timestamp = rng.random_bool(0.3).then(|| rng.random_range(-1_000..2_000_000_000));
            apply(&mut g, Mutation::InsertNode { label: Some(label), attrs, timestamp });
        }
        let timed = rng.random_bool(0.5);
        for i in 0..n as u64 {
            for j in i + 1..n as u64 {
                if !rng.random_bool(p) {
                    continue;
                }
                let out = apply(
                    &mut g,
                    Mutation::InsertEdge {
                        u: NodeId(i),
                        v: NodeId(j),
                        weight: *WEIGHTS.choose(&mut rng).unwrap(),
                        timestamp: (timed && rng.random_bool(0.8)).then(|| rng.random_range(0..2_000_000_000)),
                    },
                );
                if rng.random_bool(0.2) {
                    apply(
                        &mut g,
                        Mutation::UpdateAttrs {
                            target: AttrTarget::Edge(out.created_edges[0]),
                            label: None,
                            weight: None,
                            set: Attributes::from([("kind".into(), AttrValue::Text(random_label(&mut rng)))]),
                            remove: Vec::new(),
                        },
                    );
                }
            }
        }
        g
    }
}

/// Agreement between a community assignment and two planted blocks: the best
/// accuracy over mappings of the blocks onto two distinct communities. A
/// single community scores the larger block's share.
pub fn planted_agreement(communities: &BTreeMap<NodeId, usize>, blocks: &BTreeMap<NodeId, usize>) -> f64 {
    let n = blocks.len() as f64;
    let mut overlap: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (v, &b) in blocks {
        *overlap.entry((b, communities[v])).or_default() += 1;
    }
    let comms: BTreeSet<usize> = communities.values().copied().collect();
    if comms.len() < 2 {
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for &b in blocks.values() {
            *sizes.entry(b).or_default() += 1;
        }
        return sizes.values().copied().max().unwrap_or(0) as f64 / n;
    }
    let at = |b: usize, c: usize| overlap.get(&(b, c)).copied().unwrap_or(0);
    let mut best = 0;
    for &c0 in &comms {
        for &c1 in &comms {
            if c0 != c1 {
                best = best.max(at(0, c0) + at(1, c1));
            }
        }
    }
    best as f64 / n
}

/// Write-then-parse checks for the file formats.
pub mod roundtrip {
    use std::collections::BTreeMap;

    use graphvis_core::io::{self, FormatId};
    use graphvis_core::{AttrValue, Attributes, Graph};

    type NodeFacts = BTreeMap<String, (Option<i64>, Attributes)>;
    type EdgeFacts = BTreeMap<(String, String), (Option<i64>, Attributes)>;

    /// What a format keeps besides topology, labels and weights.
    pub struct Fidelity {
        pub edge_time: bool,
        pub node_data: bool,
        pub edge_attrs: bool,
    }

    pub fn fidelity(f: FormatId) -> Fidelity {
        use FormatId::*;
        match f {
            EdgelistTxt | EdgelistCsv | EdgelistTsv => Fidelity { edge_time: true, node_data: false, edge_attrs: false },
            Mtx | Pajek => Fidelity { edge_time: false, node_data: false, edge_attrs: false },
            Gexf | Graphml | Gml | Json => Fidelity { edge_time: true, node_data: true, edge_attrs: true },
        }
    }

    /// GML has no boolean type; booleans come back as text.
    fn normalize(f: FormatId, attrs: &Attributes) -> Attributes {
        attrs
            .iter()
            .map(|(k, v)| match (f, v) {
                (FormatId::Gml, AttrValue::Bool(b)) => (k.clone(), AttrValue::Text(b.to_string())),
                _ => (k.clone(), v.clone()),
            })
            .collect()
    }

    fn node_facts(g: &Graph, f: FormatId) -> NodeFacts {
        g.nodes().map(|n| (n.label.clone(), (n.timestamp, normalize(f, &n.attributes)))).collect()
    }

    fn edge_facts(g: &Graph, f: FormatId, keep_attrs: bool) -> EdgeFacts {
        g.edges()
            .map(|e| {
                let (a, b) = (g.node(e.u).unwrap().label.clone(), g.node(e.v).unwrap().label.clone());
                let attrs = if keep_attrs { normalize(f, &e.attributes) } else { Attributes::new() };
                ((a.clone().min(b.clone()), a.max(b)), (e.timestamp, attrs))
            })
            .collect()
    }

    /// `parse(write(g))` is label-isomorphic to `g` and keeps whatever else
    /// the format can carry; the canonical extension detects back to `f`.
    pub fn check(g: &Graph, f: FormatId) -> Result<(), String> {
        let text = io::write(g, f);
        let back = io::parse(text.as_bytes(), f).map_err(|e| format!("{f}: {e}\n{text}"))?;
        if !crate::isomorphic_labeled(g, &back) {
            return Err(format!("{f}: not isomorphic\n{text}"));
        }
        let fid = fidelity(f);
        let strip_times = |mut m: EdgeFacts| {
            if !fid.edge_time {
                m.values_mut().for_each(|v| v.0 = None);
            }
            m
        };
        if strip_times(edge_facts(g, f, fid.edge_attrs)) != edge_facts(&back, f, fid.edge_attrs) {
            return Err(format!("{f}: edge timestamps or attributes changed\n{text}"));
        }
        if fid.node_data && node_facts(g, f) != node_facts(&back, f) {
            return Err(format!("{f}: node timestamps or attributes changed\n{text}"));
        }
        // Detection needs a nonempty head; an empty edge list has none.
        if text.is_empty() {
            return Ok(());
        }
        let name = format!("graph.{}", f.extension());
        match io::detect_format(&name, text.as_bytes()) {
            Ok(d) if d == f => Ok(()),
            other => Err(format!("{f}: canonical extension detected as {other:?}")),
        }
    }

    /// Checks every `name line column` entry of `malformed.expected` under
    /// `root` and that each fixture has one. Returns the number checked.
    pub fn check_malformed(root: &std::path::Path) -> Result<usize, String> {
        let expected = std::fs::read_to_string(root.join("malformed.expected")).map_err(|e| e.to_string())?;
        let mut seen = 0;
        for line in expected.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [name, line_no, column] = fields[..] else {
                return Err(format!("bad expectation line '{line}'"));
            };
            let want = (line_no.parse().map_err(|_| line.to_owned())?, column.parse().map_err(|_| line.to_owned())?);
            let bytes = std::fs::read(root.join("malformed").join(name)).map_err(|e| format!("{name}: {e}"))?;
            match io::load(name, &bytes) {
                Err(e @ graphvis_core::IoError::Parse { .. }) if e.position() == Some(want) => {}
                Err(e @ graphvis_core::IoError::Parse { .. }) => return Err(format!("{name}: {e}, expected position {want:?}")),
                other => return Err(format!("{name}: expected a parse error, got {other:?}")),
            }
            seen += 1;
        }
        let on_disk = std::fs::read_dir(root.join("malformed")).map_err(|e| e.to_string())?.count();
        if seen != on_disk {
            return Err(format!("{on_disk} fixtures but {seen} expectations"));
        }
        Ok(seen)
    }
}
