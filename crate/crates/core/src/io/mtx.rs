//! MatrixMarket coordinate format.
//!
//! Every entry `(i, j)` becomes an undirected edge; diagonal entries are
//! dropped. Node labels travel in comment lines of the form
//! `% node <index> "<label>"`, which other readers ignore.

use std::collections::BTreeMap;

use super::{error_at, fmt_num, lines, IoError};
use crate::graph::{Attributes, Graph, NodeId};

const BANNER: &str = "%%MatrixMarket";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
    /// No banner: accept two or three columns.
    Unknown,
}

fn label_comment(rest: &str) -> Option<(usize, String)> {
    let rest = rest.trim_start().strip_prefix("node")?;
    let rest = rest.trim_start();
    let (idx, rest) = rest.split_once(char::is_whitespace)?;
    let idx = idx.parse().ok()?;
    let body = rest.trim().strip_prefix('"')?.strip_suffix('"')?;
    Some((idx, body.replace("\"\"", "\"")))
}

pub(crate) fn parse(text: &str) -> Result<Graph, IoError> {
    let mut field = Field::Unknown;
    let mut labels: BTreeMap<usize, (String, usize)> = BTreeMap::new();
    let mut size: Option<(usize, usize, usize)> = None;
    let mut ids: Vec<NodeId> = Vec::new();
    let mut g = Graph::new();
    let mut seen = 0usize;
    let mut last_offset = 0;

    for (lineno, start, line) in lines(text) {
        let t = line.trim();
        let at = |col: usize, msg: String| error_at(text, start + col, msg);
        if lineno == 1 && t.starts_with(BANNER) {
            let words: Vec<String> = t.split_whitespace().map(str::to_ascii_lowercase).collect();
            if words.len() != 5 || words[1] != "matrix" {
                return Err(at(0, "malformed MatrixMarket banner".into()));
            }
            if words[2] != "coordinate" {
                return Err(at(0, format!("unsupported MatrixMarket layout '{}'", words[2])));
            }
            field = match words[3].as_str() {
                "real" | "integer" | "double" => Field::Real,
                "pattern" => Field::Pattern,
                other => return Err(at(0, format!("unsupported MatrixMarket field '{other}'"))),
            };
            if !matches!(words[4].as_str(), "general" | "symmetric" | "skew-symmetric" | "hermitian") {
                return Err(at(0, format!("unknown MatrixMarket symmetry '{}'", words[4])));
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('%') {
            if let Some((idx, label)) = label_comment(rest) {
                labels.insert(idx, (label, start));
            }
            continue;
        }
        let col_of = |tok: &str| tok.as_ptr() as usize - line.as_ptr() as usize;
        let toks: Vec<&str> = line.split_whitespace().collect();
        last_offset = start + line.len();
        let Some((rows, cols, nnz)) = size else {
            if toks.len() != 3 {
                return Err(at(col_of(toks[0]), "expected size line 'rows cols entries'".into()));
            }
            let mut nums = [0usize; 3];
            for (k, tok) in toks.iter().enumerate() {
                nums[k] = tok.parse().map_err(|_| at(col_of(tok), format!("invalid size '{tok}'")))?;
            }
            let n = nums[0].max(nums[1]);
            for (&idx, (_, off)) in &labels {
                if idx == 0 || idx > n {
                    return Err(error_at(text, *off, format!("label for node {idx} outside 1..={n}")));
                }
            }
            ids = (1..=n)
                .map(|i| {
                    let label = labels.get(&i).map_or_else(|| i.to_string(), |(l, _)| l.clone());
                    g.insert_node_raw(Some(label), Attributes::new(), None)
                })
                .collect();
            size = Some((nums[0], nums[1], nums[2]));
            continue;
        };
        if seen == nnz {
            return Err(at(col_of(toks[0]), format!("more entries than the declared {nnz}")));
        }
        let arity_ok = match field {
            Field::Real => toks.len() == 3,
            Field::Pattern => toks.len() == 2,
            Field::Unknown => toks.len() == 2 || toks.len() == 3,
        };
        if !arity_ok {
            return Err(at(col_of(toks[0]), format!("entry has {} fields", toks.len())));
        }
        let index = |k: usize, bound: usize| -> Result<usize, IoError> {
            let tok = toks[k];
            match tok.parse::<usize>() {
                Ok(i) if (1..=bound).contains(&i) => Ok(i),
                _ => Err(at(col_of(tok), format!("index '{tok}' outside 1..={bound}"))),
            }
        };
        let i = index(0, rows)?;
        let j = index(1, cols)?;
        let weight = match toks.get(2) {
            Some(tok) => tok.parse::<f64>().ok().filter(|w| w.is_finite()).ok_or_else(|| at(col_of(tok), format!("invalid value '{tok}'")))?,
            None => 1.0,
        };
        seen += 1;
        if i != j {
            g.merge_edge(ids[i - 1], ids[j - 1], weight, None, Attributes::new());
        }
    }
    match size {
        None => Err(error_at(text, text.len(), "missing size line")),
        Some((_, _, nnz)) if seen < nnz => Err(error_at(text, last_offset, format!("expected {nnz} entries, found {seen}"))),
        Some(_) => Ok(g),
    }
}

/// Lower-triangular symmetric real entries, one per edge.
pub(crate) fn write(g: &Graph) -> String {
    let index: BTreeMap<NodeId, usize> = g.node_ids().zip(1..).collect();
    let mut out = format!("{BANNER} matrix coordinate real symmetric\n");
    for n in g.nodes() {
        let i = index[&n.id];
        if n.label != i.to_string() {
            out.push_str(&format!("% node {i} \"{}\"\n", n.label.replace('"', "\"\"")));
        }
    }
    let n = g.node_count();
    out.push_str(&format!("{n} {n} {}\n", g.edge_count()));
    for e in g.edges() {
        let (a, b) = (index[&e.u], index[&e.v]);
        out.push_str(&format!("{} {} {}\n", a.max(b), a.min(b), fmt_num(e.weight)));
    }
    out
}
