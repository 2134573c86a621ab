//! GML (`graph [ node [ ... ] edge [ ... ] ]`).
//!
//! Strings use `&quot;` and `&amp;` for the two characters GML cannot hold
//! literally. Scalar node and edge keys other than the reserved ones become
//! attributes; nested lists such as `graphics` are skipped.

use std::collections::HashMap;

use super::{error_at, fmt_num, is_time_key, parse_timestamp, IoError};
use crate::graph::{AttrValue, Attributes, Graph, NodeId};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: Value,
    offset: usize,
    value_offset: usize,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
    Open,
    Close,
}

fn unescape(s: &str) -> String {
    s.replace("&quot;", "\"").replace("&amp;", "&")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;")
}

impl<'a> Lexer<'a> {
    fn skip_blank(&mut self) {
        let b = self.src.as_bytes();
        loop {
            while self.pos < b.len() && b[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let at_line_start = self.src[..self.pos].trim_end_matches([' ', '\t']).ends_with('\n') || self.src[..self.pos].trim().is_empty();
            if self.pos < b.len() && b[self.pos] == b'#' && at_line_start {
                while self.pos < b.len() && b[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, usize)>, IoError> {
        self.skip_blank();
        let b = self.src.as_bytes();
        let start = self.pos;
        let Some(&c) = b.get(start) else { return Ok(None) };
        let tok = match c {
            b'[' => {
                self.pos += 1;
                Tok::Open
            }
            b']' => {
                self.pos += 1;
                Tok::Close
            }
            b'"' => {
                let end = self.src[start + 1..]
                    .find('"')
                    .ok_or_else(|| error_at(self.src, start, "unterminated string"))?;
                self.pos = start + 1 + end + 1;
                Tok::Str(unescape(&self.src[start + 1..start + 1 + end]))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
                    self.pos += 1;
                }
                Tok::Key(self.src[start..self.pos].to_owned())
            }
            c if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                while self.pos < b.len() && !b[self.pos].is_ascii_whitespace() && b[self.pos] != b']' && b[self.pos] != b'[' {
                    self.pos += 1;
                }
                let s = &self.src[start..self.pos];
                if let Ok(i) = s.parse::<i64>() {
                    Tok::Int(i)
                } else {
                    match s.parse::<f64>() {
                        Ok(x) if x.is_finite() => Tok::Real(x),
                        _ => return Err(error_at(self.src, start, format!("invalid number '{s}'"))),
                    }
                }
            }
            _ => return Err(error_at(self.src, start, format!("unexpected character '{}'", self.src[start..].chars().next().unwrap_or('?')))),
        };
        Ok(Some((tok, start)))
    }
}

/// Reads `key value` pairs until `]` (nested) or end of input (top level).
fn read_list(lx: &mut Lexer<'_>, nested: Option<usize>) -> Result<Vec<Entry>, IoError> {
    let mut out = Vec::new();
    loop {
        let Some((tok, offset)) = lx.next()? else {
            return match nested {
                Some(open) => Err(error_at(lx.src, open, "unclosed '['")),
                None => Ok(out),
            };
        };
        let key = match tok {
            Tok::Close if nested.is_some() => return Ok(out),
            Tok::Key(k) => k,
            _ => return Err(error_at(lx.src, offset, "expected a key")),
        };
        let Some((tok, value_offset)) = lx.next()? else {
            return Err(error_at(lx.src, lx.src.len(), format!("missing value for '{key}'")));
        };
        let value = match tok {
            Tok::Int(i) => Value::Int(i),
            Tok::Real(x) => Value::Real(x),
            Tok::Str(s) => Value::Str(s),
            Tok::Open => Value::List(read_list(lx, Some(value_offset))?),
            _ => return Err(error_at(lx.src, value_offset, format!("invalid value for '{key}'"))),
        };
        out.push(Entry {
            key,
            value,
            offset,
            value_offset,
        });
    }
}

fn id_key(v: &Value) -> Option<String> {
    match v {
        Value::Int(i) => Some(i.to_string()),
        Value::Str(s) => Some(format!("\"{s}")),
        _ => None,
    }
}

fn scalar_attr(v: &Value) -> Option<AttrValue> {
    match v {
        Value::Int(i) => Some(AttrValue::Number(*i as f64)),
        Value::Real(x) => Some(AttrValue::Number(*x)),
        Value::Str(s) => Some(AttrValue::Text(s.clone())),
        Value::List(_) => None,
    }
}

fn timestamp(src: &str, e: &Entry) -> Result<i64, IoError> {
    let s = match &e.value {
        Value::Int(i) => return Ok(*i),
        Value::Real(x) => x.to_string(),
        Value::Str(s) => s.clone(),
        Value::List(_) => String::new(),
    };
    parse_timestamp(&s).ok_or_else(|| error_at(src, e.value_offset, format!("invalid timestamp for '{}'", e.key)))
}

pub(crate) fn parse(text: &str) -> Result<Graph, IoError> {
    let mut lx = Lexer { src: text, pos: 0 };
    let top = read_list(&mut lx, None)?;
    let graph = top
        .iter()
        .find(|e| e.key == "graph")
        .ok_or_else(|| error_at(text, 0, "no 'graph [' block"))?;
    let Value::List(body) = &graph.value else {
        return Err(error_at(text, graph.value_offset, "'graph' must be a list"));
    };
    let mut g = Graph::new();
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    for e in body {
        match (e.key.as_str(), &e.value) {
            ("directed", Value::Int(d)) => g.set_directed(*d != 0),
            ("node", Value::List(fields)) => {
                let id = fields
                    .iter()
                    .find(|f| f.key == "id")
                    .ok_or_else(|| error_at(text, e.offset, "node without id"))?;
                let key = id_key(&id.value).ok_or_else(|| error_at(text, id.value_offset, "node id must be an integer or string"))?;
                if ids.contains_key(&key) {
                    return Err(error_at(text, id.value_offset, "duplicate node id"));
                }
                let mut label = None;
                let mut ts = None;
                let mut attrs = Attributes::new();
                for f in fields {
                    match f.key.as_str() {
                        "id" => {}
                        "label" => label = Some(scalar_text(&f.value).ok_or_else(|| error_at(text, f.value_offset, "label must be a scalar"))?),
                        k if is_time_key(k) => ts = Some(timestamp(text, f)?),
                        k => {
                            if let Some(v) = scalar_attr(&f.value) {
                                attrs.insert(k.to_owned(), v);
                            }
                        }
                    }
                }
                let label = label.unwrap_or_else(|| key.trim_start_matches('"').to_owned());
                ids.insert(key, g.insert_node_raw(Some(label), attrs, ts));
            }
            ("node", _) | ("edge", Value::Int(_) | Value::Real(_) | Value::Str(_)) => {
                return Err(error_at(text, e.value_offset, format!("'{}' must be a list", e.key)));
            }
            _ => {}
        }
    }
    for e in body.iter().filter(|e| e.key == "edge") {
        let Value::List(fields) = &e.value else { unreachable!("rejected above") };
        let endpoint = |name: &str| -> Result<NodeId, IoError> {
            let f = fields
                .iter()
                .find(|f| f.key == name)
                .ok_or_else(|| error_at(text, e.offset, format!("edge without {name}")))?;
            id_key(&f.value)
                .and_then(|k| ids.get(&k).copied())
                .ok_or_else(|| error_at(text, f.value_offset, format!("edge {name} is not a declared node")))
        };
        let (u, v) = (endpoint("source")?, endpoint("target")?);
        let mut weight = 1.0;
        let mut ts = None;
        let mut attrs = Attributes::new();
        for f in fields {
            match f.key.as_str() {
                "source" | "target" | "id" => {}
                "weight" | "value" => {
                    weight = match f.value {
                        Value::Int(i) => i as f64,
                        Value::Real(x) => x,
                        _ => return Err(error_at(text, f.value_offset, "weight must be numeric")),
                    }
                }
                k if is_time_key(k) => ts = Some(timestamp(text, f)?),
                k => {
                    if let Some(v) = scalar_attr(&f.value) {
                        attrs.insert(k.to_owned(), v);
                    }
                }
            }
        }
        g.merge_edge(u, v, weight, ts, attrs);
    }
    Ok(g)
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Int(i) => Some(i.to_string()),
        Value::Real(x) => Some(x.to_string()),
        Value::Str(s) => Some(s.clone()),
        Value::List(_) => None,
    }
}

fn gml_key(k: &str) -> Option<&str> {
    let ok = k.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    ok.then_some(k)
}

fn attr_lines(out: &mut String, attrs: &Attributes, reserved: &[&str]) {
    for (k, v) in attrs {
        let Some(k) = gml_key(k).filter(|k| !reserved.contains(k) && !is_time_key(k)) else { continue };
        let value = match v {
            AttrValue::Number(x) => fmt_num(*x),
            AttrValue::Bool(b) => format!("\"{b}\""),
            AttrValue::Text(s) => format!("\"{}\"", escape(s)),
        };
        out.push_str(&format!("    {k} {value}\n"));
    }
}

/// Attributes whose keys are not GML identifiers are not written.
pub(crate) fn write(g: &Graph) -> String {
    let mut out = String::from("graph [\n");
    out.push_str(&format!("  directed {}\n", u8::from(g.is_directed())));
    for n in g.nodes() {
        out.push_str(&format!("  node [\n    id {}\n    label \"{}\"\n", n.id, escape(&n.label)));
        if let Some(t) = n.timestamp {
            out.push_str(&format!("    timestamp {t}\n"));
        }
        attr_lines(&mut out, &n.attributes, &["id", "label"]);
        out.push_str("  ]\n");
    }
    for e in g.edges() {
        out.push_str(&format!("  edge [\n    source {}\n    target {}\n    weight {}\n", e.u, e.v, fmt_num(e.weight)));
        if let Some(t) = e.timestamp {
            out.push_str(&format!("    timestamp {t}\n"));
        }
        attr_lines(&mut out, &e.attributes, &["source", "target", "id", "weight", "value"]);
        out.push_str("  ]\n");
    }
    out.push_str("]\n");
    out
}
