//! Model-based, pattern-based and block-model graph generation.
//!
//! All generation is deterministic for a fixed seed: every call owns its own
//! ChaCha stream, and block models derive one sub-stream per block.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::StatsCache;
use crate::graph::{AttrValue, Attributes, Graph, GraphError, NodeId};
use crate::mutation::{apply_mutation, Endpoint, Mutation, MutationOutcome, NewEdge, NewNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    Clique,
    Star,
    Cycle,
    Chain,
}

/// Base model of one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum BlockBase {
    Er { p: f64 },
    /// `weights.len()` must equal the block size.
    Cl { weights: Vec<f64> },
    Pa { m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub size: usize,
    pub base: BlockBase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    #[serde(alias = "erdos-renyi")]
    Er {
        n: usize,
        p: f64,
    },
    #[serde(alias = "chung-lu")]
    Cl {
        weights: Vec<f64>,
    },
    #[serde(alias = "preferential-attachment")]
    Pa {
        n: usize,
        m: usize,
    },
    Pattern {
        kind: PatternKind,
        size: usize,
    },
    Block {
        blocks: Vec<BlockSpec>,
        q: f64,
        /// Optional per-block-pair probabilities overriding `q`.
        #[serde(default, rename = "q-matrix", skip_serializing_if = "Option::is_none")]
        q_matrix: Option<Vec<Vec<f64>>>,
    },
}

/// Declarative generator request; same JSON object as the service body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: Model,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid(msg: impl Into<String>) -> GeneratorError {
    GeneratorError::InvalidSpec(msg.into())
}

/// Name of the node attribute recording block membership.
pub const BLOCK_ATTR: &str = "block";

fn check_prob(name: &str, p: f64) -> Result<(), GeneratorError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn check_weights(w: &[f64]) -> Result<(), GeneratorError> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid("Chung-Lu weights must be finite and nonnegative"));
    }
    Ok(())
}

fn check_pa(n: usize, m: usize) -> Result<(), GeneratorError> {
    if m < 1 {
        return Err(invalid("preferential attachment needs m >= 1"));
    }
    if n < m + 1 {
        return Err(invalid(format!("preferential attachment needs n >= m + 1, got n={n}, m={m}")));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn new(model: Model, seed: u64) -> Self {
        Self { model, seed }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        match &self.model {
            Model::Er { p, .. } => check_prob("p", *p),
            Model::Cl { weights } => check_weights(weights),
            Model::Pa { n, m } => check_pa(*n, *m),
            Model::Pattern { kind, size } => {
                if *size < 1 {
                    return Err(invalid("pattern size must be at least 1"));
                }
                if *kind == PatternKind::Cycle && *size < 3 {
                    return Err(invalid("a cycle needs at least 3 nodes"));
                }
                Ok(())
            }
            Model::Block { blocks, q, q_matrix } => {
                if blocks.is_empty() {
                    return Err(invalid("a block model needs at least one block"));
                }
                check_prob("q", *q)?;
                for b in blocks {
                    match &b.base {
                        BlockBase::Er { p } => check_prob("p", *p)?,
                        BlockBase::Cl { weights } => {
                            check_weights(weights)?;
                            if weights.len() != b.size {
                                return Err(invalid("Chung-Lu block weights must match the block size"));
                            }
                        }
                        BlockBase::Pa { m } => check_pa(b.size, *m)?,
                    }
                }
                if let Some(qm) = q_matrix {
                    if qm.len() != blocks.len() || qm.iter().any(|r| r.len() != blocks.len()) {
                        return Err(invalid("q-matrix must be square with one row per block"));
                    }
                    for (i, row) in qm.iter().enumerate() {
                        for (j, &x) in row.iter().enumerate() {
                            check_prob("q-matrix entry", x)?;
                            if x != qm[j][i] {
                                return Err(invalid("q-matrix must be symmetric"));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether some Chung-Lu pair probability exceeds 1 and gets clipped.
    pub fn clipped(&self) -> bool {
        match &self.model {
            Model::Cl { weights } => chung_lu_clipped(weights),
            Model::Block { blocks, .. } => blocks.iter().any(|b| match &b.base {
                BlockBase::Cl { weights } => chung_lu_clipped(weights),
                _ => false,
            }),
            _ => false,
        }
    }
}

pub fn chung_lu_clipped(weights: &[f64]) -> bool {
    let total: f64 = weights.iter().sum();
    let mut top = weights.to_vec();
    top.sort_by(|a, b| b.total_cmp(a));
    top.len() >= 2 && top[0] * top[1] > total
}

/// Edge list over local indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Topology {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
    } else if p > 0.0 && n > 1 {
        // Geometric skipping over the pairs (u, v), u < v, in row-major order.
        let log_q = (1.0 - p).ln();
        let (mut u, mut v) = (0usize, 0usize);
        loop {
            let r: f64 = 1.0 - rng.random::<f64>();
            let skip = (r.ln() / log_q).floor() as usize;
            v = v + 1 + skip;
            while v >= n && u < n - 1 {
                v = v - n + u + 2;
                u += 1;
            }
            if u >= n - 1 {
                break;
            }
            edges.push((u, v));
        }
    }
    Topology { n, edges }
}

fn chung_lu(weights: &[f64], rng: &mut ChaCha8Rng) -> Topology {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let mut edges = Vec::new();
    if total > 0.0 {
        for u in 0..n {
            for v in u + 1..n {
                let p = (weights[u] * weights[v] / total).min(1.0);
                if p > 0.0 && rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
    }
    Topology { n, edges }
}

fn preferential_attachment(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Topology {
    let mut edges = Vec::new();
    // Every edge contributes both endpoints, so a uniform draw is degree-proportional.
    let mut endpoints = Vec::new();
    for u in 0..=m {
        for v in u + 1..=m {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    for new in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            targets.insert(t);
        }
        for t in targets {
            edges.push((t, new));
            endpoints.extend([t, new]);
        }
    }
    Topology { n, edges }
}

fn pattern(kind: PatternKind, size: usize) -> Topology {
    let edges = match kind {
        PatternKind::Clique => (0..size).flat_map(|u| (u + 1..size).map(move |v| (u, v))).collect(),
        PatternKind::Star => (1..size).map(|v| (0, v)).collect(),
        PatternKind::Chain => (1..size).map(|v| (v - 1, v)).collect(),
        PatternKind::Cycle => (0..size).map(|v| (v.min((v + 1) % size), v.max((v + 1) % size))).collect(),
    };
    Topology { n: size, edges }
}

/// Topology plus per-node block index.
fn build(spec: &GeneratorSpec) -> Result<(Topology, Option<Vec<usize>>), GeneratorError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let topo = match &spec.model {
        Model::Er { n, p } => erdos_renyi(*n, *p, &mut rng),
        Model::Cl { weights } => chung_lu(weights, &mut rng),
        Model::Pa { n, m } => preferential_attachment(*n, *m, &mut rng),
        Model::Pattern { kind, size } => pattern(*kind, *size),
        Model::Block { blocks, q, q_matrix } => {
            let mut edges = Vec::new();
            let mut membership = Vec::new();
            for (b, block) in blocks.iter().enumerate() {
                let mut block_rng = ChaCha8Rng::seed_from_u64(rng.random());
                let local = match &block.base {
                    BlockBase::Er { p } => erdos_renyi(block.size, *p, &mut block_rng),
                    BlockBase::Cl { weights } => chung_lu(weights, &mut block_rng),
                    BlockBase::Pa { m } => preferential_attachment(block.size, *m, &mut block_rng),
                };
                let offset = membership.len();
                edges.extend(local.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
                membership.extend(std::iter::repeat_n(b, block.size));
            }
            let n = membership.len();
            let mut cross_rng = ChaCha8Rng::seed_from_u64(rng.random());
            for u in 0..n {
                for v in u + 1..n {
                    let (bu, bv) = (membership[u], membership[v]);
                    if bu == bv {
                        continue;
                    }
                    let p = q_matrix.as_ref().map_or(*q, |qm| qm[bu][bv]);
                    if p > 0.0 && cross_rng.random::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            edges.sort_unstable();
            return Ok((Topology { n, edges }, Some(membership)));
        }
    };
    Ok((topo, None))
}

/// Builds a fresh graph from `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph, GeneratorError> {
    let (topo, membership) = build(spec)?;
    let mut g = Graph::new();
    let ids: Vec<NodeId> = (0..topo.n)
        .map(|i| {
            let mut attrs = Attributes::new();
            if let Some(m) = &membership {
                attrs.insert(BLOCK_ATTR.to_owned(), AttrValue::Number(m[i] as f64));
            }
            g.insert_node_raw(None, attrs, None)
        })
        .collect();
    for (u, v) in topo.edges {
        g.insert_edge_raw(ids[u], ids[v], 1.0, None, Attributes::new());
    }
    Ok(g)
}

/// Alias of [`generate`] restricted to block specs.
pub fn generate_block(spec: &GeneratorSpec) -> Result<Graph, GeneratorError> {
    if !matches!(spec.model, Model::Block { .. }) {
        return Err(invalid("generate_block needs a block model spec"));
    }
    generate(spec)
}

/// Inserts a generated structure into `g` as one `insert-subgraph` mutation.
///
/// Each node in `attach_to` gains one edge to an inserted node drawn uniformly
/// from a stream seeded by `spec`. Returns the inserted ids.
pub fn insert_generated(
    g: &mut Graph,
    cache: &mut StatsCache,
    spec: &GeneratorSpec,
    attach_to: &BTreeSet<NodeId>,
) -> Result<Vec<NodeId>, GeneratorError> {
    Ok(insert_generated_outcome(g, cache, spec, attach_to)?.created_nodes)
}

/// [`insert_generated`], returning the full mutation outcome.
pub fn insert_generated_outcome(
    g: &mut Graph,
    cache: &mut StatsCache,
    spec: &GeneratorSpec,
    attach_to: &BTreeSet<NodeId>,
) -> Result<MutationOutcome, GeneratorError> {
    if let Some(&missing) = attach_to.iter().find(|n| !g.contains_node(**n)) {
        return Err(GraphError::UnknownNode(missing).into());
    }
    let (topo, membership) = build(spec)?;
    if topo.n == 0 && !attach_to.is_empty() {
        return Err(invalid("cannot attach to an empty generated structure"));
    }
    let nodes = (0..topo.n)
        .map(|i| NewNode {
            label: None,
            attrs: membership
                .as_ref()
                .map(|m| Attributes::from([(BLOCK_ATTR.to_owned(), AttrValue::Number(m[i] as f64))]))
                .unwrap_or_default(),
            timestamp: None,
        })
        .collect();
    let edge = |u, v| NewEdge {
        u,
        v,
        weight: 1.0,
        timestamp: None,
    };
    let mut edges: Vec<NewEdge> = topo
        .edges
        .iter()
        .map(|&(u, v)| edge(Endpoint::New(u), Endpoint::New(v)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_a77a_c4ed_0000);
    for &a in attach_to {
        edges.push(edge(Endpoint::Node(a), Endpoint::New(rng.random_range(0..topo.n))));
    }
    Ok(apply_mutation(g, cache, &Mutation::InsertSubgraph { nodes, edges })?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(model: Model) -> GeneratorSpec {
        GeneratorSpec::new(model, 42)
    }

    #[test]
    fn er_extremes() {
        assert_eq!(generate(&spec(Model::Er { n: 5, p: 0.0 })).unwrap().edge_count(), 0);
        assert_eq!(generate(&spec(Model::Er { n: 5, p: 1.0 })).unwrap().edge_count(), 10);
        assert_eq!(generate(&spec(Model::Er { n: 0, p: 0.5 })).unwrap().node_count(), 0);
        assert_eq!(generate(&spec(Model::Er { n: 1, p: 0.5 })).unwrap().edge_count(), 0);
    }

    #[test]
    fn er_skipping_visits_valid_pairs() {
        let g = generate(&spec(Model::Er { n: 30, p: 0.3 })).unwrap();
        assert!(g.edge_count() > 0);
        assert!(g.edges().all(|e| e.u < e.v && e.v.0 < 30));
        let g = generate(&spec(Model::Er { n: 7, p: 0.999_999 })).unwrap();
        assert_eq!(g.edge_count(), 21);
    }

    #[test]
    fn pa_edge_count() {
        let g = generate(&spec(Model::Pa { n: 5, m: 2 })).unwrap();
        assert_eq!(g.edge_count(), 7);
        let g = generate(&spec(Model::Pa { n: 40, m: 3 })).unwrap();
        assert_eq!(g.edge_count(), 6 + 36 * 3);
    }

    #[test]
    fn patterns() {
        let g = generate(&spec(Model::Pattern { kind: PatternKind::Star, size: 4 })).unwrap();
        assert_eq!((g.node_count(), g.edge_count(), g.degree(NodeId(0))), (4, 3, 3));
        let g = generate(&spec(Model::Pattern { kind: PatternKind::Cycle, size: 5 })).unwrap();
        assert!(g.node_ids().all(|n| g.degree(n) == 2));
        let g = generate(&spec(Model::Pattern { kind: PatternKind::Chain, size: 1 })).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let g = generate(&spec(Model::Pattern { kind: PatternKind::Clique, size: 4 })).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn invalid_specs() {
        for m in [
            Model::Er { n: 3, p: 1.5 },
            Model::Pa { n: 5, m: 0 },
            Model::Pa { n: 2, m: 2 },
            Model::Pattern { kind: PatternKind::Cycle, size: 2 },
            Model::Pattern { kind: PatternKind::Star, size: 0 },
            Model::Cl { weights: vec![1.0, -1.0] },
            Model::Block { blocks: vec![], q: 0.1, q_matrix: None },
            Model::Block {
                blocks: vec![BlockSpec { size: 3, base: BlockBase::Cl { weights: vec![1.0] } }],
                q: 0.1,
                q_matrix: None,
            },
        ] {
            assert!(matches!(generate(&spec(m)), Err(GeneratorError::InvalidSpec(_))));
        }
    }

    #[test]
    fn blocks_forced_cases() {
        let blocks = vec![
            BlockSpec { size: 3, base: BlockBase::Er { p: 1.0 } },
            BlockSpec { size: 3, base: BlockBase::Er { p: 1.0 } },
        ];
        let g = generate_block(&spec(Model::Block { blocks: blocks.clone(), q: 0.0, q_matrix: None })).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.node(NodeId(4)).unwrap().attributes[BLOCK_ATTR], AttrValue::Number(1.0));
        let g = generate_block(&spec(Model::Block { blocks: blocks.clone(), q: 1.0, q_matrix: None })).unwrap();
        assert_eq!(g.edge_count(), 15);
        let qm = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let g = generate_block(&spec(Model::Block { blocks, q: 0.0, q_matrix: Some(qm) })).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(generate_block(&spec(Model::Er { n: 3, p: 0.5 })).is_err());
    }

    #[test]
    fn clipping_flag() {
        assert!(!spec(Model::Cl { weights: vec![2.0; 4] }).clipped());
        assert!(spec(Model::Cl { weights: vec![10.0, 10.0, 1.0] }).clipped());
    }

    #[test]
    fn json_shape() {
        let s: GeneratorSpec = serde_json::from_str(r#"{"model":"er","n":5,"p":1.0}"#).unwrap();
        assert_eq!(s, GeneratorSpec::new(Model::Er { n: 5, p: 1.0 }, 0));
        let s: GeneratorSpec = serde_json::from_str(
            r#"{"model":"block","q":0.01,"seed":3,"blocks":[{"size":4,"base":{"model":"pa","m":1}}]}"#,
        )
        .unwrap();
        assert!(s.validate().is_ok());
        let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn insert_into_graph() {
        let mut g = Graph::new();
        let mut cache = StatsCache::for_graph(&g);
        let ids = insert_generated(
            &mut g,
            &mut cache,
            &spec(Model::Pattern { kind: PatternKind::Clique, size: 3 }),
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(cache.scalar(crate::MeasureKey::TotalTriangles), Some(1.0));

        let anchor = BTreeSet::from([NodeId(0)]);
        insert_generated(&mut g, &mut cache, &spec(Model::Pattern { kind: PatternKind::Chain, size: 3 }), &anchor).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (6, 6));

        let err = insert_generated(&mut g, &mut cache, &spec(Model::Er { n: 2, p: 1.0 }), &BTreeSet::from([NodeId(99)]));
        assert_eq!(err, Err(GeneratorError::Graph(GraphError::UnknownNode(NodeId(99)))));
    }
}
