//! Pajek `.net` files: `*Vertices`, `*Edges`/`*Arcs` and their `list` forms.
//!
//! Arcs are loaded as undirected edges and set the directed flag. Coordinates
//! and drawing parameters after the label are ignored. Labels cannot contain
//! a double quote.

use super::{error_at, fmt_num, lines, IoError};
use crate::graph::{Attributes, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Vertices,
    Pairs,
    Lists,
}

/// Splits a line into tokens with byte offsets; `"..."` is one token.
fn tokens(line: &str) -> Result<Vec<(&str, usize)>, usize> {
    let mut out = Vec::new();
    let b = line.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_whitespace() {
            i += 1;
        } else if b[i] == b'"' {
            let end = line[i + 1..].find('"').ok_or(i)? + i + 1;
            out.push((&line[i + 1..end], i));
            i = end + 1;
        } else {
            let start = i;
            while i < b.len() && !b[i].is_ascii_whitespace() {
                i += 1;
            }
            out.push((&line[start..i], start));
        }
    }
    Ok(out)
}

pub(crate) fn parse(text: &str) -> Result<Graph, IoError> {
    let mut g = Graph::new();
    let mut ids: Vec<NodeId> = Vec::new();
    let mut section = Section::Preamble;

    for (_, start, line) in lines(text) {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let toks = tokens(line).map_err(|at| error_at(text, start + at, "unterminated quoted label"))?;
        let at = |k: usize, msg: String| error_at(text, start + toks[k].1, msg);
        if let Some(head) = toks[0].0.strip_prefix('*') {
            section = match head.to_ascii_lowercase().as_str() {
                "network" => Section::Preamble,
                "vertices" => {
                    if !ids.is_empty() {
                        return Err(at(0, "repeated *Vertices section".into()));
                    }
                    let n: usize = toks
                        .get(1)
                        .and_then(|(s, _)| s.parse().ok())
                        .ok_or_else(|| at(0, "*Vertices needs a vertex count".into()))?;
                    ids = (1..=n).map(|i| g.insert_node_raw(Some(i.to_string()), Attributes::new(), None)).collect();
                    Section::Vertices
                }
                "edges" | "arcs" => {
                    g.set_directed(g.is_directed() || head.eq_ignore_ascii_case("arcs"));
                    Section::Pairs
                }
                "edgeslist" | "arcslist" => {
                    g.set_directed(g.is_directed() || head.eq_ignore_ascii_case("arcslist"));
                    Section::Lists
                }
                other => return Err(at(0, format!("unsupported section *{other}"))),
            };
            continue;
        }
        let index = |k: usize| -> Result<usize, IoError> {
            let tok = toks[k].0;
            match tok.parse::<usize>() {
                Ok(i) if (1..=ids.len()).contains(&i) => Ok(i - 1),
                _ => Err(at(k, format!("vertex '{tok}' outside 1..={}", ids.len()))),
            }
        };
        match section {
            Section::Preamble => return Err(at(0, "data before *Vertices".into())),
            Section::Vertices => {
                let v = index(0)?;
                if let Some((label, _)) = toks.get(1) {
                    g.node_mut(ids[v]).expect("created above").label = (*label).to_owned();
                }
            }
            Section::Pairs => {
                if toks.len() < 2 {
                    return Err(at(0, "edge needs two endpoints".into()));
                }
                let (u, v) = (index(0)?, index(1)?);
                let weight = match toks.get(2) {
                    Some((tok, _)) => tok.parse::<f64>().ok().filter(|w| w.is_finite()).ok_or_else(|| at(2, format!("invalid weight '{tok}'")))?,
                    None => 1.0,
                };
                if u != v {
                    g.merge_edge(ids[u], ids[v], weight, None, Attributes::new());
                }
            }
            Section::Lists => {
                let u = index(0)?;
                for k in 1..toks.len() {
                    let v = index(k)?;
                    if u != v {
                        g.merge_edge(ids[u], ids[v], 1.0, None, Attributes::new());
                    }
                }
            }
        }
    }
    Ok(g)
}

pub(crate) fn write(g: &Graph) -> String {
    let index: std::collections::BTreeMap<NodeId, usize> = g.node_ids().zip(1..).collect();
    let mut out = format!("*Vertices {}\n", g.node_count());
    for n in g.nodes() {
        out.push_str(&format!("{} \"{}\"\n", index[&n.id], n.label.replace('"', "'")));
    }
    out.push_str(if g.is_directed() { "*Arcs\n" } else { "*Edges\n" });
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", index[&e.u], index[&e.v], fmt_num(e.weight)));
    }
    out
}
