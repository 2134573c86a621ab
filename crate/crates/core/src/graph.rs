//! Mutable simple graph with node/edge attributes and optional timestamps.
//!
//! Ids are dense, monotone and never reused. All measures treat the graph as
//! its underlying undirected simple graph: adjacency is always stored in both
//! directions, and the `directed` flag only records the orientation of `u -> v`
//! for serialization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Scalar attribute value attached to nodes and edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl AttrValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            AttrValue::Text(s) => s.trim().parse().ok(),
            AttrValue::Bool(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Bool(b) => b.fmt(f),
            AttrValue::Number(x) => x.fmt(f),
            AttrValue::Text(s) => s.fmt(f),
        }
    }
}

impl From<f64> for AttrValue {
    fn from(x: f64) -> Self {
        AttrValue::Number(x)
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Text(s.to_owned())
    }
}

impl From<String> for AttrValue {
    fn from(s: String) -> Self {
        AttrValue::Text(s)
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

pub type Attributes = BTreeMap<String, AttrValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub label: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: Attributes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: Attributes,
}

impl EdgeRecord {
    /// The endpoint opposite to `n`.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.u == n {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("self-loop on node {0} rejected")]
    SelfLoop(NodeId),
    #[error("edge between {0} and {1} already exists")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge weight must be finite")]
    NonFiniteWeight,
    #[error("attribute keys must be nonempty")]
    EmptyAttributeKey,
    #[error("subgraph endpoint refers to new node #{0}, which is out of range")]
    BadLocalIndex(usize),
}

/// Key of the attribute that carries a node's id in the graph it was extracted from.
pub const ORIGINAL_ID_ATTR: &str = "orig_id";

/// The single source of truth for graph topology and attributes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "GraphData", into = "GraphData")]
pub struct Graph {
    directed: bool,
    nodes: BTreeMap<NodeId, NodeRecord>,
    edges: BTreeMap<EdgeId, EdgeRecord>,
    adjacency: BTreeMap<NodeId, BTreeMap<NodeId, EdgeId>>,
    next_node: u64,
    next_edge: u64,
    version: u64,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_directed() -> Self {
        Self {
            directed: true,
            ..Self::default()
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn set_directed(&mut self, directed: bool) {
        self.directed = directed;
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.next_node)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&EdgeRecord> {
        self.edges.get(&id)
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &NodeRecord> + '_ {
        self.nodes.values()
    }

    /// Edges in ascending id order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &EdgeRecord> + '_ {
        self.edges.values()
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency.get(&id).map_or(0, BTreeMap::len)
    }

    /// Neighbors of `id` with the connecting edge, ascending by neighbor id.
    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = (NodeId, EdgeId)> + '_ {
        self.adjacency
            .get(&id)
            .into_iter()
            .flat_map(|m| m.iter().map(|(&n, &e)| (n, e)))
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adjacency.get(&u)?.get(&v).copied()
    }

    /// Common neighbors of `u` and `v`, ascending.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let (Some(a), Some(b)) = (self.adjacency.get(&u), self.adjacency.get(&v)) else {
            return Vec::new();
        };
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        small
            .keys()
            .filter(|w| large.contains_key(w))
            .copied()
            .collect()
    }

    pub fn add_node(&mut self, label: Option<String>, attrs: Attributes) -> Result<NodeId, GraphError> {
        check_keys(&attrs)?;
        let id = self.insert_node_raw(label, attrs, None);
        self.bump();
        Ok(id)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: f64, ts: Option<i64>) -> Result<EdgeId, GraphError> {
        self.check_new_edge(u, v, weight)?;
        let id = self.insert_edge_raw(u, v, weight, ts, Attributes::new());
        self.bump();
        Ok(id)
    }

    /// Removes a node together with all of its incident edges; returns how many edges went.
    pub fn delete_node(&mut self, id: NodeId) -> Result<usize, GraphError> {
        if !self.contains_node(id) {
            return Err(GraphError::UnknownNode(id));
        }
        let removed = self.remove_node_raw(id);
        self.bump();
        Ok(removed)
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<(), GraphError> {
        if !self.edges.contains_key(&id) {
            return Err(GraphError::UnknownEdge(id));
        }
        self.remove_edge_raw(id);
        self.bump();
        Ok(())
    }

    /// Copy of the subgraph induced by `nodes`. New ids are dense in ascending
    /// original-id order and the original id is kept under [`ORIGINAL_ID_ATTR`].
    pub fn induced_subgraph(&self, nodes: &BTreeSet<NodeId>) -> Result<Graph, GraphError> {
        if let Some(&missing) = nodes.iter().find(|n| !self.contains_node(**n)) {
            return Err(GraphError::UnknownNode(missing));
        }
        let edges = self
            .edges
            .values()
            .filter(|e| nodes.contains(&e.u) && nodes.contains(&e.v))
            .map(|e| e.id)
            .collect();
        Ok(self.extract(nodes, &edges))
    }

    /// Copy containing exactly the given nodes and edges. Edge endpoints must be in `nodes`.
    pub(crate) fn extract(&self, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> Graph {
        let mut out = Graph {
            directed: self.directed,
            ..Graph::default()
        };
        let mut remap = BTreeMap::new();
        for id in nodes {
            let rec = &self.nodes[id];
            let mut attrs = rec.attributes.clone();
            attrs.insert(ORIGINAL_ID_ATTR.to_owned(), AttrValue::Number(id.0 as f64));
            let new = out.insert_node_raw(Some(rec.label.clone()), attrs, rec.timestamp);
            remap.insert(*id, new);
        }
        for id in edges {
            let e = &self.edges[id];
            out.insert_edge_raw(remap[&e.u], remap[&e.v], e.weight, e.timestamp, e.attributes.clone());
        }
        out
    }

    pub(crate) fn check_new_edge(&self, u: NodeId, v: NodeId, weight: f64) -> Result<(), GraphError> {
        for n in [u, v] {
            if !self.contains_node(n) {
                return Err(GraphError::UnknownNode(n));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.find_edge(u, v).is_some() {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        if !weight.is_finite() {
            return Err(GraphError::NonFiniteWeight);
        }
        Ok(())
    }

    pub(crate) fn bump(&mut self) {
        self.version += 1;
    }

    pub(crate) fn insert_node_raw(&mut self, label: Option<String>, attributes: Attributes, timestamp: Option<i64>) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        let label = label.unwrap_or_else(|| id.0.to_string());
        self.nodes.insert(
            id,
            NodeRecord {
                id,
                label,
                attributes,
                timestamp,
            },
        );
        self.adjacency.insert(id, BTreeMap::new());
        id
    }

    /// Caller guarantees the edge is valid (see [`Graph::check_new_edge`]).
    pub(crate) fn insert_edge_raw(&mut self, u: NodeId, v: NodeId, weight: f64, timestamp: Option<i64>, attributes: Attributes) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(
            id,
            EdgeRecord {
                id,
                u,
                v,
                weight,
                timestamp,
                attributes,
            },
        );
        self.adjacency.entry(u).or_default().insert(v, id);
        self.adjacency.entry(v).or_default().insert(u, id);
        id
    }

    pub(crate) fn remove_edge_raw(&mut self, id: EdgeId) -> Option<EdgeRecord> {
        let e = self.edges.remove(&id)?;
        if let Some(m) = self.adjacency.get_mut(&e.u) {
            m.remove(&e.v);
        }
        if let Some(m) = self.adjacency.get_mut(&e.v) {
            m.remove(&e.u);
        }
        Some(e)
    }

    pub(crate) fn remove_node_raw(&mut self, id: NodeId) -> usize {
        let incident: Vec<EdgeId> = self.neighbors(id).map(|(_, e)| e).collect();
        for e in &incident {
            self.remove_edge_raw(*e);
        }
        self.adjacency.remove(&id);
        self.nodes.remove(&id);
        incident.len()
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> Option<&mut NodeRecord> {
        self.nodes.get_mut(&id)
    }

    pub(crate) fn edge_mut(&mut self, id: EdgeId) -> Option<&mut EdgeRecord> {
        self.edges.get_mut(&id)
    }

    /// Used by parsers for merge-on-load semantics: returns `None` for a
    /// self-loop or an already-present pair instead of erroring.
    pub(crate) fn merge_edge(&mut self, u: NodeId, v: NodeId, weight: f64, timestamp: Option<i64>, attributes: Attributes) -> Option<EdgeId> {
        if u == v || self.find_edge(u, v).is_some() {
            return None;
        }
        Some(self.insert_edge_raw(u, v, weight, timestamp, attributes))
    }
}

pub(crate) fn check_keys(attrs: &Attributes) -> Result<(), GraphError> {
    if attrs.keys().any(String::is_empty) {
        return Err(GraphError::EmptyAttributeKey);
    }
    Ok(())
}

/// Lossless serialized form of a [`Graph`], including id counters and version.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct GraphData {
    directed: bool,
    next_node: u64,
    next_edge: u64,
    version: u64,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

impl From<Graph> for GraphData {
    fn from(g: Graph) -> Self {
        GraphData {
            directed: g.directed,
            next_node: g.next_node,
            next_edge: g.next_edge,
            version: g.version,
            nodes: g.nodes.into_values().collect(),
            edges: g.edges.into_values().collect(),
        }
    }
}

impl From<GraphData> for Graph {
    fn from(d: GraphData) -> Self {
        let mut g = Graph {
            directed: d.directed,
            ..Graph::default()
        };
        let mut max_node = 0;
        for n in d.nodes {
            max_node = max_node.max(n.id.0 + 1);
            g.adjacency.insert(n.id, BTreeMap::new());
            g.nodes.insert(n.id, n);
        }
        let mut max_edge = 0;
        for e in d.edges {
            // Corrupt input is dropped rather than breaking adjacency invariants.
            if !g.contains_node(e.u) || !g.contains_node(e.v) || e.u == e.v || g.find_edge(e.u, e.v).is_some() {
                continue;
            }
            max_edge = max_edge.max(e.id.0 + 1);
            g.adjacency.get_mut(&e.u).unwrap().insert(e.v, e.id);
            g.adjacency.get_mut(&e.v).unwrap().insert(e.u, e.id);
            g.edges.insert(e.id, e);
        }
        g.next_node = d.next_node.max(max_node);
        g.next_edge = d.next_edge.max(max_edge);
        g.version = d.version;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> (Graph, [NodeId; 3]) {
        let mut g = Graph::new();
        let a = g.add_node(None, Attributes::new()).unwrap();
        let b = g.add_node(None, Attributes::new()).unwrap();
        let c = g.add_node(None, Attributes::new()).unwrap();
        g.add_edge(a, b, 1.0, None).unwrap();
        g.add_edge(b, c, 1.0, None).unwrap();
        (g, [a, b, c])
    }

    fn complete(n: usize) -> Graph {
        let mut g = Graph::new();
        let ids: Vec<_> = (0..n).map(|_| g.add_node(None, Attributes::new()).unwrap()).collect();
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(ids[i], ids[j], 1.0, None).unwrap();
            }
        }
        g
    }

    #[test]
    fn first_ids_come_from_counter() {
        let mut g = Graph::new();
        assert_eq!(g.add_node(None, Attributes::new()).unwrap(), NodeId(0));
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.add_node(None, Attributes::new()).unwrap(), NodeId(1));
        assert_eq!(g.add_node(None, Attributes::new()).unwrap(), NodeId(2));
        assert_eq!(g.node(NodeId(2)).unwrap().label, "2");
    }

    #[test]
    fn ids_are_not_reused_after_delete() {
        let mut g = Graph::new();
        let a = g.add_node(None, Attributes::new()).unwrap();
        g.delete_node(a).unwrap();
        let b = g.add_node(None, Attributes::new()).unwrap();
        assert_ne!(a, b);
        assert_eq!(b, NodeId(1));
    }

    #[test]
    fn path_degrees() {
        let (g, [a, b, c]) = path3();
        assert_eq!((g.degree(a), g.degree(b), g.degree(c)), (1, 2, 1));
        assert_eq!(g.version(), 5);
    }

    #[test]
    fn edge_policy_errors() {
        let (mut g, [a, b, _]) = path3();
        let before = g.version();
        assert_eq!(g.add_edge(a, a, 1.0, None), Err(GraphError::SelfLoop(a)));
        assert_eq!(g.add_edge(b, a, 1.0, None), Err(GraphError::DuplicateEdge(b, a)));
        assert_eq!(g.add_edge(a, NodeId(99), 1.0, None), Err(GraphError::UnknownNode(NodeId(99))));
        assert_eq!(g.add_edge(a, NodeId(2), f64::NAN, None), Err(GraphError::NonFiniteWeight));
        assert_eq!(g.version(), before);
    }

    #[test]
    fn delete_k4_vertex_leaves_k3() {
        let mut g = complete(4);
        assert_eq!(g.delete_node(NodeId(0)).unwrap(), 3);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        for u in g.node_ids() {
            assert_eq!(g.degree(u), 2);
            assert!(g.neighbors(u).all(|(v, _)| v != NodeId(0)));
        }
    }

    #[test]
    fn delete_isolated_and_unknown() {
        let mut g = Graph::new();
        let a = g.add_node(None, Attributes::new()).unwrap();
        assert_eq!(g.delete_node(a), Ok(0));
        assert_eq!(g.delete_node(a), Err(GraphError::UnknownNode(a)));
        assert_eq!(g.delete_edge(EdgeId(7)), Err(GraphError::UnknownEdge(EdgeId(7))));
    }

    #[test]
    fn delete_then_readd_edge() {
        let mut g = complete(3);
        let e = g.find_edge(NodeId(0), NodeId(1)).unwrap();
        g.delete_edge(e).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(NodeId(0)), 1);
        assert_eq!(g.degree(NodeId(1)), 1);
        let e2 = g.add_edge(NodeId(1), NodeId(0), 1.0, None).unwrap();
        assert_ne!(e, e2);
    }

    #[test]
    fn induced_subgraphs() {
        let g = complete(4);
        let sub = g.induced_subgraph(&[NodeId(0), NodeId(2), NodeId(3)].into()).unwrap();
        assert_eq!((sub.node_count(), sub.edge_count()), (3, 3));
        assert_eq!(
            sub.node(NodeId(1)).unwrap().attributes[ORIGINAL_ID_ATTR],
            AttrValue::Number(2.0)
        );
        assert!(g.induced_subgraph(&BTreeSet::new()).unwrap().is_empty());

        let (p, [a, _, c]) = path3();
        let sub = p.induced_subgraph(&[a, c].into()).unwrap();
        assert_eq!((sub.node_count(), sub.edge_count()), (2, 0));
        assert_eq!(
            p.induced_subgraph(&[NodeId(42)].into()),
            Err(GraphError::UnknownNode(NodeId(42)))
        );
    }

    #[test]
    fn serde_round_trip_keeps_counters() {
        let mut g = complete(4);
        g.delete_node(NodeId(1)).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.next_node_id(), NodeId(4));
    }

    #[test]
    fn empty_attribute_key_rejected() {
        let mut g = Graph::new();
        let attrs = Attributes::from([(String::new(), AttrValue::Bool(true))]);
        assert_eq!(g.add_node(None, attrs), Err(GraphError::EmptyAttributeKey));
    }
}
