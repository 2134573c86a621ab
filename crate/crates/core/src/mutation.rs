//! Graph mutations and their application with incremental cache maintenance.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cache::StatsCache;
use crate::graph::{check_keys, Attributes, EdgeId, Graph, GraphError, NodeId};
use crate::measure::MeasureKey;

fn default_weight() -> f64 {
    1.0
}

/// Endpoint of an edge inside an `insert-subgraph` payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    /// Index into the payload's `nodes` list.
    New(usize),
    /// A node already in the graph.
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NewNode {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub attrs: Attributes,
    #[serde(default)]
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewEdge {
    pub u: Endpoint,
    pub v: Endpoint,
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default)]
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttrTarget {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mutation {
    InsertNode {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        attrs: Attributes,
        #[serde(default)]
        timestamp: Option<i64>,
    },
    InsertEdge {
        u: NodeId,
        v: NodeId,
        #[serde(default = "default_weight")]
        weight: f64,
        #[serde(default)]
        timestamp: Option<i64>,
    },
    DeleteNode {
        id: NodeId,
    },
    DeleteEdge {
        id: EdgeId,
    },
    InsertSubgraph {
        #[serde(default)]
        nodes: Vec<NewNode>,
        #[serde(default)]
        edges: Vec<NewEdge>,
    },
    UpdateAttrs {
        target: AttrTarget,
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        weight: Option<f64>,
        #[serde(default)]
        set: Attributes,
        #[serde(default)]
        remove: Vec<String>,
    },
}

impl Mutation {
    pub fn insert_edge(u: NodeId, v: NodeId) -> Self {
        Mutation::InsertEdge {
            u,
            v,
            weight: 1.0,
            timestamp: None,
        }
    }

    pub fn changes_topology(&self) -> bool {
        !matches!(self, Mutation::UpdateAttrs { .. })
    }

    /// Checks every precondition against `g` without touching it.
    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        match self {
            Mutation::InsertNode { attrs, .. } => check_keys(attrs),
            Mutation::InsertEdge { u, v, weight, .. } => g.check_new_edge(*u, *v, *weight),
            Mutation::DeleteNode { id } => g.node(*id).map(|_| ()).ok_or(GraphError::UnknownNode(*id)),
            Mutation::DeleteEdge { id } => g.edge(*id).map(|_| ()).ok_or(GraphError::UnknownEdge(*id)),
            Mutation::InsertSubgraph { nodes, edges } => {
                for n in nodes {
                    check_keys(&n.attrs)?;
                }
                let mut seen = BTreeSet::new();
                for e in edges {
                    let resolve = |ep: Endpoint| match ep {
                        Endpoint::New(i) if i < nodes.len() => Ok((true, i as u64)),
                        Endpoint::New(i) => Err(GraphError::BadLocalIndex(i)),
                        Endpoint::Node(id) if g.contains_node(id) => Ok((false, id.0)),
                        Endpoint::Node(id) => Err(GraphError::UnknownNode(id)),
                    };
                    let a = resolve(e.u)?;
                    let b = resolve(e.v)?;
                    if a == b {
                        return Err(match e.u {
                            Endpoint::Node(id) => GraphError::SelfLoop(id),
                            Endpoint::New(i) => GraphError::SelfLoop(NodeId(g.next_node_id().0 + i as u64)),
                        });
                    }
                    if !a.0 && !b.0 && g.find_edge(NodeId(a.1), NodeId(b.1)).is_some() {
                        return Err(GraphError::DuplicateEdge(NodeId(a.1), NodeId(b.1)));
                    }
                    if !seen.insert((a.min(b), a.max(b))) {
                        let id = |x: (bool, u64)| NodeId(if x.0 { g.next_node_id().0 + x.1 } else { x.1 });
                        return Err(GraphError::DuplicateEdge(id(a), id(b)));
                    }
                    if !e.weight.is_finite() {
                        return Err(GraphError::NonFiniteWeight);
                    }
                }
                Ok(())
            }
            Mutation::UpdateAttrs { target, set, weight, .. } => {
                match target {
                    AttrTarget::Node(id) if !g.contains_node(*id) => return Err(GraphError::UnknownNode(*id)),
                    AttrTarget::Edge(id) if g.edge(*id).is_none() => return Err(GraphError::UnknownEdge(*id)),
                    _ => {}
                }
                if weight.is_some_and(|w| !w.is_finite()) {
                    return Err(GraphError::NonFiniteWeight);
                }
                check_keys(set)
            }
        }
    }
}

/// What a successfully applied mutation did.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MutationOutcome {
    pub version: u64,
    pub created_nodes: Vec<NodeId>,
    pub created_edges: Vec<EdgeId>,
    pub removed_edges: usize,
    /// Measures whose cached value changed or went stale.
    pub changed_measures: Vec<MeasureKey>,
}

/// Applies one mutation, keeping `cache` consistent with the new version.
///
/// Incremental measures are patched in place; lazy ones are marked stale. On
/// error neither the graph nor the cache is modified.
pub fn apply_mutation(g: &mut Graph, cache: &mut StatsCache, m: &Mutation) -> Result<MutationOutcome, GraphError> {
    m.validate(g)?;
    let mut out = MutationOutcome::default();
    match m {
        Mutation::InsertNode { label, attrs, timestamp } => {
            let id = g.insert_node_raw(label.clone(), attrs.clone(), *timestamp);
            cache.node_added(id);
            out.created_nodes.push(id);
        }
        Mutation::InsertEdge { u, v, weight, timestamp } => {
            let e = add_edge_tracked(g, cache, *u, *v, *weight, *timestamp);
            out.created_edges.push(e);
        }
        Mutation::DeleteNode { id } => {
            let incident: Vec<EdgeId> = g.neighbors(*id).map(|(_, e)| e).collect();
            for e in &incident {
                remove_edge_tracked(g, cache, *e);
            }
            g.remove_node_raw(*id);
            cache.node_removed(*id);
            out.removed_edges = incident.len();
        }
        Mutation::DeleteEdge { id } => {
            remove_edge_tracked(g, cache, *id);
            out.removed_edges = 1;
        }
        Mutation::InsertSubgraph { nodes, edges } => {
            for n in nodes {
                let id = g.insert_node_raw(n.label.clone(), n.attrs.clone(), n.timestamp);
                cache.node_added(id);
                out.created_nodes.push(id);
            }
            let resolve = |ep: Endpoint| match ep {
                Endpoint::New(i) => out.created_nodes[i],
                Endpoint::Node(id) => id,
            };
            let mut created_edges = Vec::with_capacity(edges.len());
            for e in edges {
                let (u, v) = (resolve(e.u), resolve(e.v));
                created_edges.push(add_edge_tracked(g, cache, u, v, e.weight, e.timestamp));
            }
            out.created_edges = created_edges;
        }
        Mutation::UpdateAttrs {
            target,
            label,
            weight,
            set,
            remove,
        } => {
            let attrs = match target {
                AttrTarget::Node(id) => {
                    let rec = g.node_mut(*id).expect("validated");
                    if let Some(l) = label {
                        rec.label = l.clone();
                    }
                    &mut rec.attributes
                }
                AttrTarget::Edge(id) => {
                    let rec = g.edge_mut(*id).expect("validated");
                    if let Some(w) = weight {
                        rec.weight = *w;
                    }
                    &mut rec.attributes
                }
            };
            for k in remove {
                attrs.remove(k);
            }
            attrs.extend(set.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
    }
    g.bump();
    out.version = g.version();
    out.changed_measures = if m.changes_topology() {
        cache.topology_changed(g.version())
    } else {
        cache.touch(g.version());
        Vec::new()
    };
    Ok(out)
}

/// Applies a batch all-or-nothing. On failure returns the index of the
/// offending mutation and leaves both graph and cache untouched.
pub fn apply_batch(
    g: &mut Graph,
    cache: &mut StatsCache,
    batch: &[Mutation],
) -> Result<Vec<MutationOutcome>, (usize, GraphError)> {
    let mut g2 = g.clone();
    let mut c2 = cache.clone();
    let mut outcomes = Vec::with_capacity(batch.len());
    for (i, m) in batch.iter().enumerate() {
        outcomes.push(apply_mutation(&mut g2, &mut c2, m).map_err(|e| (i, e))?);
    }
    *g = g2;
    *cache = c2;
    Ok(outcomes)
}

fn add_edge_tracked(g: &mut Graph, cache: &mut StatsCache, u: NodeId, v: NodeId, weight: f64, ts: Option<i64>) -> EdgeId {
    let common = g.common_neighbors(u, v);
    let (du, dv) = (g.degree(u), g.degree(v));
    let e = g.insert_edge_raw(u, v, weight, ts, Attributes::new());
    cache.edge_added(g, e, u, v, &common, du, dv);
    e
}

fn remove_edge_tracked(g: &mut Graph, cache: &mut StatsCache, id: EdgeId) {
    let (u, v) = {
        let e = g.edge(id).expect("validated");
        (e.u, e.v)
    };
    let common = g.common_neighbors(u, v);
    let (du, dv) = (g.degree(u), g.degree(v));
    g.remove_edge_raw(id);
    cache.edge_removed(g, id, u, v, &common, du, dv);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let m: Mutation = serde_json::from_str(r#"{"kind":"insert-edge","u":0,"v":2}"#).unwrap();
        assert_eq!(m, Mutation::insert_edge(NodeId(0), NodeId(2)));
        let m: Mutation = serde_json::from_str(
            r#"{"kind":"insert-subgraph","nodes":[{},{"label":"x"}],"edges":[{"u":{"new":0},"v":{"node":4}}]}"#,
        )
        .unwrap();
        let Mutation::InsertSubgraph { nodes, edges } = m else { panic!() };
        assert_eq!(nodes[1].label.as_deref(), Some("x"));
        assert_eq!(edges[0].v, Endpoint::Node(NodeId(4)));
        let m: Mutation =
            serde_json::from_str(r#"{"kind":"update-attrs","target":{"node":1},"label":"karp"}"#).unwrap();
        assert!(!m.changes_topology());
    }

    #[test]
    fn one_version_per_mutation() {
        let mut g = Graph::new();
        let mut c = StatsCache::new();
        let m = Mutation::InsertSubgraph {
            nodes: vec![NewNode::default(); 3],
            edges: vec![
                NewEdge { u: Endpoint::New(0), v: Endpoint::New(1), weight: 1.0, timestamp: None },
                NewEdge { u: Endpoint::New(1), v: Endpoint::New(2), weight: 1.0, timestamp: None },
            ],
        };
        let out = apply_mutation(&mut g, &mut c, &m).unwrap();
        assert_eq!(out.version, 1);
        assert_eq!(out.created_nodes.len(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn invalid_subgraph_payloads() {
        let g = Graph::new();
        let bad_index = Mutation::InsertSubgraph {
            nodes: vec![NewNode::default()],
            edges: vec![NewEdge { u: Endpoint::New(0), v: Endpoint::New(3), weight: 1.0, timestamp: None }],
        };
        assert_eq!(bad_index.validate(&g), Err(GraphError::BadLocalIndex(3)));
        let dup = Mutation::InsertSubgraph {
            nodes: vec![NewNode::default(); 2],
            edges: vec![
                NewEdge { u: Endpoint::New(0), v: Endpoint::New(1), weight: 1.0, timestamp: None },
                NewEdge { u: Endpoint::New(1), v: Endpoint::New(0), weight: 1.0, timestamp: None },
            ],
        };
        assert!(matches!(dup.validate(&g), Err(GraphError::DuplicateEdge(..))));
        let lp = Mutation::InsertSubgraph {
            nodes: vec![NewNode::default()],
            edges: vec![NewEdge { u: Endpoint::New(0), v: Endpoint::New(0), weight: 1.0, timestamp: None }],
        };
        assert!(matches!(lp.validate(&g), Err(GraphError::SelfLoop(_))));
    }

    #[test]
    fn batch_is_atomic() {
        let mut g = Graph::new();
        let mut c = StatsCache::for_graph(&g);
        let batch = vec![
            Mutation::InsertNode { label: None, attrs: Attributes::new(), timestamp: None },
            Mutation::DeleteNode { id: NodeId(9) },
        ];
        let err = apply_batch(&mut g, &mut c, &batch).unwrap_err();
        assert_eq!(err, (1, GraphError::UnknownNode(NodeId(9))));
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.version(), 0);
        assert_eq!(c, StatsCache::for_graph(&Graph::new()));
    }
}
