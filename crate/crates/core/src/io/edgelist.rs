//! Plain, comma- and tab-separated edge lists.
//!
//! Rows are `u v [weight [timestamp]]`; a single-field row declares an
//! isolated node. Nodes are identified by label. A header row naming the
//! columns is recognized and may add attribute columns.

use std::collections::{BTreeSet, HashMap};

use super::{error_at, fmt_num, is_time_key, lines, parse_timestamp, IoError};
use crate::graph::{AttrValue, Attributes, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dialect {
    Txt,
    Csv,
    Tsv,
}

impl Dialect {
    fn delimiter(self) -> Option<char> {
        match self {
            Dialect::Txt => None,
            Dialect::Csv => Some(','),
            Dialect::Tsv => Some('\t'),
        }
    }

    fn separator(self) -> &'static str {
        match self {
            Dialect::Txt => " ",
            Dialect::Csv => ",",
            Dialect::Tsv => "\t",
        }
    }
}

/// A field and the byte offset where it starts.
type Field = (String, usize);

fn quoted(line: &str, start: usize) -> Result<(String, usize), (usize, String)> {
    let mut out = String::new();
    let mut chars = line[start + 1..].char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '"' {
            if chars.peek().is_some_and(|&(_, c)| c == '"') {
                chars.next();
                out.push('"');
            } else {
                return Ok((out, start + 1 + i + 1));
            }
        } else {
            out.push(c);
        }
    }
    Err((start, "unterminated quoted field".into()))
}

fn split(line: &str, dialect: Dialect) -> Result<Vec<Field>, (usize, String)> {
    let mut fields = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    match dialect.delimiter() {
        None => loop {
            while i < bytes.len() && (bytes[i] as char).is_ascii_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            if bytes[i] == b'"' {
                let (s, end) = quoted(line, i)?;
                if end < bytes.len() && !(bytes[end] as char).is_ascii_whitespace() {
                    return Err((end, "unexpected character after closing quote".into()));
                }
                fields.push((s, i));
                i = end;
            } else {
                let start = i;
                while i < bytes.len() && !(bytes[i] as char).is_ascii_whitespace() {
                    i += 1;
                }
                fields.push((line[start..i].to_owned(), start));
            }
        },
        Some(d) => loop {
            while i < bytes.len() && bytes[i] == b' ' {
                i += 1;
            }
            let start = i;
            if i < bytes.len() && bytes[i] == b'"' {
                let (s, end) = quoted(line, i)?;
                i = end;
                while i < bytes.len() && bytes[i] == b' ' {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] as char != d {
                    return Err((i, "unexpected character after closing quote".into()));
                }
                fields.push((s, start));
            } else {
                let end = line[i..].find(d).map_or(line.len(), |j| i + j);
                fields.push((line[i..end].trim_end_matches(' ').to_owned(), start));
                i = end;
            }
            if i >= bytes.len() {
                break;
            }
            i += 1;
        },
    }
    Ok(fields)
}

const ENDPOINT_NAMES: &[&str] = &["source", "target", "from", "to", "src", "dst", "u", "v", "node1", "node2", "id1", "id2"];
const WEIGHT_NAMES: &[&str] = &["weight", "w", "value"];

fn numeric(s: &str) -> bool {
    s.parse::<f64>().is_ok()
}

fn is_header(fields: &[Field]) -> bool {
    if fields.len() < 2 || fields.iter().any(|(f, _)| f.is_empty() || numeric(f)) {
        return false;
    }
    let name = |i: usize| fields[i].0.to_ascii_lowercase();
    if fields.len() == 2 {
        ENDPOINT_NAMES.contains(&name(0).as_str()) && ENDPOINT_NAMES.contains(&name(1).as_str())
    } else {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Column {
    Weight,
    Time,
    Attr(String),
}

pub(crate) fn parse(text: &str, dialect: Dialect) -> Result<Graph, IoError> {
    let mut g = Graph::new();
    let mut by_label: HashMap<String, NodeId> = HashMap::new();
    let mut columns: Option<Vec<Column>> = None;
    let mut first = true;
    let mut node = |g: &mut Graph, label: &str| *by_label.entry(label.to_owned()).or_insert_with(|| g.insert_node_raw(Some(label.to_owned()), Attributes::new(), None));

    for (_, start, line) in lines(text) {
        let t = line.trim_start();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let fields = split(line, dialect).map_err(|(at, msg)| error_at(text, start + at, msg))?;
        let err = |f: &Field, msg: String| error_at(text, start + f.1, msg);
        if std::mem::take(&mut first) && is_header(&fields) {
            let cols = fields[2..]
                .iter()
                .map(|(name, _)| {
                    let lower = name.to_ascii_lowercase();
                    if WEIGHT_NAMES.contains(&lower.as_str()) {
                        Column::Weight
                    } else if is_time_key(&lower) || lower == "date" {
                        Column::Time
                    } else {
                        Column::Attr(name.clone())
                    }
                })
                .collect();
            columns = Some(cols);
            continue;
        }
        // An empty label must be written as `""`.
        if let Some(f) = fields.iter().take(2).find(|f| f.0.is_empty() && line.as_bytes().get(f.1) != Some(&b'"')) {
            return Err(err(f, "empty node label".into()));
        }
        if fields.len() == 1 {
            node(&mut g, &fields[0].0);
            continue;
        }
        let cols = columns.clone().unwrap_or_else(|| vec![Column::Weight, Column::Time]);
        if fields.len() > 2 + cols.len() {
            return Err(err(&fields[2 + cols.len()], format!("unexpected column {}", 3 + cols.len())));
        }
        let mut weight = 1.0;
        let mut ts = None;
        let mut attrs = Attributes::new();
        for (f, col) in fields[2..].iter().zip(&cols) {
            let v = f.0.trim();
            match col {
                Column::Weight if !v.is_empty() => {
                    weight = v.parse::<f64>().ok().filter(|w| w.is_finite()).ok_or_else(|| err(f, format!("invalid weight '{v}'")))?;
                }
                Column::Time if !v.is_empty() && v != "-" => {
                    ts = Some(parse_timestamp(v).ok_or_else(|| err(f, format!("invalid timestamp '{v}'")))?);
                }
                Column::Attr(name) if !v.is_empty() => {
                    let value = v.parse::<f64>().map_or_else(|_| AttrValue::Text(f.0.clone()), AttrValue::Number);
                    attrs.insert(name.clone(), value);
                }
                _ => {}
            }
        }
        let u = node(&mut g, &fields[0].0);
        let v = node(&mut g, &fields[1].0);
        g.merge_edge(u, v, weight, ts, attrs);
    }
    Ok(g)
}

fn needs_quotes(label: &str, dialect: Dialect) -> bool {
    label.is_empty()
        || label.starts_with(['#', '%', ' '])
        || label.ends_with(' ')
        || label.contains('"')
        || match dialect {
            Dialect::Txt => label.chars().any(|c| c.is_ascii_whitespace()),
            Dialect::Csv => label.contains([',', '\n', '\r']),
            Dialect::Tsv => label.contains(['\t', '\n', '\r']),
        }
}

fn token(label: &str, dialect: Dialect) -> String {
    if needs_quotes(label, dialect) {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_owned()
    }
}

/// Writes isolated nodes as single-field rows, then one row per edge.
/// Falls back to node ids as tokens when labels are not unique.
pub(crate) fn write(g: &Graph, dialect: Dialect) -> String {
    let labels: BTreeSet<&str> = g.nodes().map(|n| n.label.as_str()).collect();
    let use_labels = labels.len() == g.node_count();
    let name = |id: NodeId| {
        if use_labels {
            token(&g.node(id).expect("edge endpoint").label, dialect)
        } else {
            id.to_string()
        }
    };
    let timed = g.edges().any(|e| e.timestamp.is_some());
    let sep = dialect.separator();
    let mut out = String::new();
    if dialect != Dialect::Txt || timed {
        let mut header = vec!["source", "target", "weight"];
        if timed {
            header.push("timestamp");
        }
        out.push_str(&header.join(sep));
        out.push('\n');
    }
    for n in g.nodes().filter(|n| g.degree(n.id) == 0) {
        out.push_str(&name(n.id));
        out.push('\n');
    }
    for e in g.edges() {
        let mut row = vec![name(e.u), name(e.v), fmt_num(e.weight)];
        if timed {
            row.push(e.timestamp.map_or_else(|| if dialect == Dialect::Txt { "-".into() } else { String::new() }, |t| t.to_string()));
        }
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    out
}
