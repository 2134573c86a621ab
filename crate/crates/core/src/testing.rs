//! Small graph builders shared by unit tests.

use crate::graph::{Attributes, Graph, NodeId};

pub fn add_nodes(g: &mut Graph, n: usize) -> Vec<NodeId> {
    (0..n).map(|_| g.add_node(None, Attributes::new()).unwrap()).collect()
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new();
    let ids = add_nodes(&mut g, n);
    for (i, &u) in ids.iter().enumerate() {
        for &v in &ids[i + 1..] {
            g.add_edge(u, v, 1.0, None).unwrap();
        }
    }
    g
}

/// Center is node 0.
pub fn star(leaves: usize) -> Graph {
    let mut g = Graph::new();
    let ids = add_nodes(&mut g, leaves + 1);
    for &v in &ids[1..] {
        g.add_edge(ids[0], v, 1.0, None).unwrap();
    }
    g
}

pub fn path(n: usize) -> Graph {
    let mut g = Graph::new();
    let ids = add_nodes(&mut g, n);
    for w in ids.windows(2) {
        g.add_edge(w[0], w[1], 1.0, None).unwrap();
    }
    g
}

pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let mut g = a.clone();
    let offset = g.next_node_id().0;
    add_nodes(&mut g, b.node_count());
    let pos: std::collections::BTreeMap<NodeId, u64> = b.node_ids().zip(0..).collect();
    for e in b.edges() {
        g.add_edge(NodeId(offset + pos[&e.u]), NodeId(offset + pos[&e.v]), e.weight, e.timestamp).unwrap();
    }
    g
}
