//! Node-link JSON.
//!
//! ```json
//! {"directed": false,
//!  "nodes": [{"id": 0, "label": "a", "attrs": {"k": 1}, "ts": 5}],
//!  "links": [{"source": 0, "target": 1, "weight": 1, "ts": 10, "attrs": {}}]}
//! ```
//!
//! Ids may be integers or strings. `label` defaults to the id; `attrs`, `ts`
//! and `weight` (1) are optional. Links may name undeclared nodes, which are
//! created on first use.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{IoError, error_at};
use crate::graph::{Attributes, Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
enum Id {
    Int(i64),
    Text(String),
}

impl Id {
    fn text(&self) -> String {
        match self {
            Id::Int(i) => i.to_string(),
            Id::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: Id,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Attributes::is_empty")]
    attrs: Attributes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ts: Option<i64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLink {
    source: Id,
    target: Id,
    #[serde(default = "one")]
    weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ts: Option<i64>,
    #[serde(default, skip_serializing_if = "Attributes::is_empty")]
    attrs: Attributes,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    #[serde(default)]
    directed: bool,
    nodes: Vec<JsonNode>,
    #[serde(default)]
    links: Vec<JsonLink>,
}

pub(crate) fn parse(text: &str) -> Result<Graph, IoError> {
    let doc: JsonGraph = serde_json::from_str(text).map_err(|e| {
        // serde_json reports 1-based line and column; column 0 means end of line.
        let offset = super::lines(text)
            .nth(e.line().saturating_sub(1))
            .map_or(text.len(), |(_, start, _)| start + e.column().saturating_sub(1));
        error_at(text, offset, e.to_string())
    })?;
    let mut g = Graph::new();
    g.set_directed(doc.directed);
    let mut ids: HashMap<Id, NodeId> = HashMap::new();
    for n in doc.nodes {
        if ids.contains_key(&n.id) {
            let at = find_id(text, &n.id);
            return Err(error_at(text, at, format!("duplicate node id {}", n.id.text())));
        }
        if n.attrs.keys().any(String::is_empty) {
            return Err(error_at(text, find_id(text, &n.id), "empty attribute key"));
        }
        let label = n.label.unwrap_or_else(|| n.id.text());
        let id = g.insert_node_raw(Some(label), n.attrs, n.ts);
        ids.insert(n.id, id);
    }
    for l in doc.links {
        let mut node = |key: Id| *ids.entry(key.clone()).or_insert_with(|| g.insert_node_raw(Some(key.text()), Attributes::new(), None));
        let (u, v) = (node(l.source), node(l.target));
        g.merge_edge(u, v, l.weight, l.ts, l.attrs);
    }
    Ok(g)
}

/// Best-effort offset of the second declaration of `id`, for error messages.
fn find_id(text: &str, id: &Id) -> usize {
    let needle = serde_json::to_string(id).unwrap_or_default();
    let hits: Vec<usize> = text.match_indices(&needle).map(|(i, _)| i).collect();
    hits.get(1).or(hits.first()).copied().unwrap_or(0)
}

pub(crate) fn write(g: &Graph) -> String {
    let doc = JsonGraph {
        directed: g.is_directed(),
        nodes: g
            .nodes()
            .map(|n| JsonNode {
                id: Id::Int(n.id.0 as i64),
                label: Some(n.label.clone()),
                attrs: n.attributes.clone(),
                ts: n.timestamp,
            })
            .collect(),
        links: g
            .edges()
            .map(|e| JsonLink {
                source: Id::Int(e.u.0 as i64),
                target: Id::Int(e.v.0 as i64),
                weight: e.weight,
                ts: e.timestamp,
                attrs: e.attributes.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AttrValue;

    #[test]
    fn parse_documented_shape() {
        let g = parse(
            r#"{"directed": false,
                "nodes": [{"id": 0, "label": "a", "attrs": {"k": 1}, "ts": 5}, {"id": "x"}],
                "links": [{"source": 0, "target": "x", "ts": 10}, {"source": "x", "target": 7}]}"#,
        )
        .unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        let a = g.node(NodeId(0)).unwrap();
        assert_eq!((a.label.as_str(), a.timestamp), ("a", Some(5)));
        assert_eq!(a.attributes["k"], AttrValue::Number(1.0));
        assert_eq!(g.node(NodeId(2)).unwrap().label, "7");
        assert_eq!(g.edges().next().unwrap().weight, 1.0);
    }

    #[test]
    fn malformed_json_is_positioned() {
        let err = parse("{\"nodes\": [\n  {\"id\": 0,}\n]}").unwrap_err();
        assert_eq!(err.position().unwrap().0, 2);
        let err = parse("{\"nodes\": [{\"id\": 0}, {\"id\": 0}]}").unwrap_err();
        assert_eq!(err.position(), Some((1, 30)));
        assert!(parse("{\"links\": []}").unwrap_err().position().is_some());
        assert!(parse("{\"nodes\": [], \"extra\": 1}").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn write_then_parse() {
        let mut g = Graph::new();
        g.insert_node_raw(Some("a".into()), Attributes::from([("x".into(), AttrValue::Bool(true))]), Some(3));
        g.insert_node_raw(Some("b".into()), Attributes::new(), None);
        g.insert_edge_raw(NodeId(0), NodeId(1), 0.5, Some(9), Attributes::new());
        let back = parse(&write(&g)).unwrap();
        assert_eq!(back.nodes().collect::<Vec<_>>(), g.nodes().collect::<Vec<_>>());
        assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}
