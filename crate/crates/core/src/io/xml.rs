//! GEXF and GraphML: flat node and edge lists with typed attributes.
//!
//! Both readers build a small element tree with quick-xml and then walk it.
//! A GEXF or GraphML attribute titled `time`/`timestamp` is read as the
//! record's timestamp.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use quick_xml::events::Event;
use quick_xml::escape::resolve_predefined_entity;
use quick_xml::{Reader, XmlVersion};

use super::{error_at, fmt_num, is_time_key, parse_timestamp, IoError};
use crate::graph::{AttrValue, Attributes, Graph, NodeId};

#[derive(Debug, Default)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
    text: String,
    offset: usize,
}

impl Element {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn children<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Element> + 'a {
        self.children.iter().filter(move |c| c.name == name)
    }

    fn child<'a>(&'a self, name: &'a str) -> Option<&'a Element> {
        self.children(name).next()
    }
}

fn local(name: &str) -> String {
    name.rsplit(':').next().unwrap_or(name).to_owned()
}

fn open(e: &quick_xml::events::BytesStart<'_>, src: &str, offset: usize) -> Result<Element, IoError> {
    let mut el = Element {
        name: local(e.name().as_ref()),
        offset,
        ..Element::default()
    };
    for a in e.attributes() {
        let a = a.map_err(|err| error_at(src, offset, format!("malformed attribute: {err}")))?;
        let key = a.key.as_ref();
        if key == "xmlns" || key.starts_with("xmlns:") {
            continue;
        }
        let value = a
            .normalized_value(XmlVersion::Implicit1_0)
            .map_err(|err| error_at(src, offset, format!("malformed attribute value: {err}")))?;
        el.attrs.push((local(key), value.into_owned()));
    }
    Ok(el)
}

fn parse_tree(src: &str) -> Result<Element, IoError> {
    let mut reader = Reader::from_str(src);
    let mut stack: Vec<Element> = Vec::new();
    let mut root = None;
    loop {
        let offset = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|err| error_at(src, reader.error_position() as usize, format!("malformed XML: {err}")))?;
        let text: Option<Cow<'_, str>> = match &event {
            Event::Start(e) | Event::Empty(e) => {
                if root.is_some() {
                    return Err(error_at(src, offset, "content after the root element"));
                }
                let el = open(e, src, offset)?;
                if matches!(event, Event::Start(_)) {
                    stack.push(el);
                } else if let Some(parent) = stack.last_mut() {
                    parent.children.push(el);
                } else {
                    root = Some(el);
                }
                None
            }
            Event::End(_) => {
                let el = stack.pop().expect("reader checks tag balance");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
                None
            }
            Event::Text(t) => Some(t.xml_content(XmlVersion::Implicit1_0)),
            Event::CData(t) => Some(t.xml_content(XmlVersion::Implicit1_0)),
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    Ok(None) => resolve_predefined_entity(r)
                        .ok_or_else(|| error_at(src, offset, format!("unknown entity '&{};'", &**r)))?
                        .to_owned(),
                    Err(err) => return Err(error_at(src, offset, format!("invalid character reference: {err}"))),
                };
                Some(Cow::Owned(resolved))
            }
            Event::Eof => break,
            _ => None,
        };
        if let Some(t) = text {
            match stack.last_mut() {
                Some(el) => el.text.push_str(&t),
                None if t.trim().is_empty() => {}
                None => return Err(error_at(src, offset, "text outside the root element")),
            }
        }
    }
    if let Some(open) = stack.first() {
        return Err(error_at(src, open.offset, format!("unclosed element <{}>", open.name)));
    }
    root.ok_or_else(|| error_at(src, src.len(), "no root element"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    Bool,
    Text,
}

impl Kind {
    fn from_type(t: &str) -> Kind {
        match t.to_ascii_lowercase().as_str() {
            "integer" | "int" | "long" | "float" | "double" | "short" | "byte" | "bigdecimal" | "biginteger" => Kind::Number,
            "boolean" => Kind::Bool,
            _ => Kind::Text,
        }
    }

    fn of(values: impl Iterator<Item = AttrValue>) -> Kind {
        let kinds: Vec<Kind> = values
            .map(|v| match v {
                AttrValue::Number(_) => Kind::Number,
                AttrValue::Bool(_) => Kind::Bool,
                AttrValue::Text(_) => Kind::Text,
            })
            .collect();
        match kinds.first() {
            Some(&k) if kinds.iter().all(|&x| x == k) => k,
            _ => Kind::Text,
        }
    }

    fn convert(self, raw: &str, src: &str, offset: usize) -> Result<AttrValue, IoError> {
        match self {
            Kind::Number => raw
                .trim()
                .parse::<f64>()
                .map(AttrValue::Number)
                .map_err(|_| error_at(src, offset, format!("'{raw}' is not a number"))),
            Kind::Bool => match raw.trim() {
                "true" | "1" => Ok(AttrValue::Bool(true)),
                "false" | "0" => Ok(AttrValue::Bool(false)),
                _ => Err(error_at(src, offset, format!("'{raw}' is not a boolean"))),
            },
            Kind::Text => Ok(AttrValue::Text(raw.to_owned())),
        }
    }
}

#[derive(Debug, Clone)]
struct AttrDecl {
    title: String,
    kind: Kind,
    default: Option<String>,
}

fn text_of(v: &AttrValue) -> String {
    match v {
        AttrValue::Number(x) => fmt_num(*x),
        AttrValue::Bool(b) => b.to_string(),
        AttrValue::Text(s) => s.clone(),
    }
}

/// Escapes for attribute values and text, including whitespace that attribute
/// normalization would otherwise fold into spaces.
fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

struct Loader<'a> {
    src: &'a str,
    g: Graph,
    ids: HashMap<String, NodeId>,
}

impl<'a> Loader<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            g: Graph::new(),
            ids: HashMap::new(),
        }
    }

    fn required<'e>(&self, el: &'e Element, key: &str) -> Result<&'e str, IoError> {
        el.attr(key)
            .ok_or_else(|| error_at(self.src, el.offset, format!("<{}> without '{key}'", el.name)))
    }

    fn add_node(&mut self, el: &Element, id: &str, label: Option<String>, attrs: Attributes, ts: Option<i64>) -> Result<(), IoError> {
        if self.ids.contains_key(id) {
            return Err(error_at(self.src, el.offset, format!("duplicate node id '{id}'")));
        }
        let n = self.g.insert_node_raw(Some(label.unwrap_or_else(|| id.to_owned())), attrs, ts);
        self.ids.insert(id.to_owned(), n);
        Ok(())
    }

    fn endpoint(&self, el: &Element, key: &str) -> Result<NodeId, IoError> {
        let id = self.required(el, key)?;
        self.ids
            .get(id)
            .copied()
            .ok_or_else(|| error_at(self.src, el.offset, format!("edge {key} '{id}' is not a declared node")))
    }

    fn weight(&self, el: &Element, raw: &str) -> Result<f64, IoError> {
        raw.trim()
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .ok_or_else(|| error_at(self.src, el.offset, format!("invalid weight '{raw}'")))
    }

    fn timestamp(&self, el: &Element, raw: &str) -> Result<i64, IoError> {
        parse_timestamp(raw.trim()).ok_or_else(|| error_at(self.src, el.offset, format!("invalid timestamp '{raw}'")))
    }

    /// Splits declared values into plain attributes and a timestamp.
    fn values(&self, el: &Element, decls: &BTreeMap<String, AttrDecl>, given: &[(String, String, usize)]) -> Result<(Attributes, Option<i64>), IoError> {
        let mut attrs = Attributes::new();
        let mut ts = None;
        for (id, d) in decls {
            let raw = given.iter().find(|(k, _, _)| k == id).map(|(_, v, off)| (v.as_str(), *off)).or(d.default.as_deref().map(|v| (v, el.offset)));
            let Some((raw, offset)) = raw else { continue };
            if is_time_key(&d.title) {
                ts = Some(parse_timestamp(raw.trim()).ok_or_else(|| error_at(self.src, offset, format!("invalid timestamp '{raw}'")))?);
            } else {
                attrs.insert(d.title.clone(), d.kind.convert(raw, self.src, offset)?);
            }
        }
        if let Some((k, _, off)) = given.iter().find(|(k, _, _)| !decls.contains_key(k)) {
            return Err(error_at(self.src, *off, format!("value for undeclared attribute '{k}'")));
        }
        Ok((attrs, ts))
    }
}

fn reject_nested(src: &str, el: &Element) -> Result<(), IoError> {
    match el.child("graph") {
        Some(sub) => Err(error_at(src, sub.offset, "nested graphs are not supported")),
        None => Ok(()),
    }
}

pub(crate) fn parse_gexf(src: &str) -> Result<Graph, IoError> {
    let root = parse_tree(src)?;
    if root.name != "gexf" {
        return Err(error_at(src, root.offset, format!("expected <gexf>, found <{}>", root.name)));
    }
    let graph = root.child("graph").ok_or_else(|| error_at(src, root.offset, "<gexf> without <graph>"))?;
    let mut ld = Loader::new(src);
    ld.g.set_directed(graph.attr("defaultedgetype") == Some("directed"));

    let mut decls: HashMap<&str, BTreeMap<String, AttrDecl>> = HashMap::new();
    for block in graph.children("attributes") {
        let class = block.attr("class").unwrap_or("node");
        for a in block.children("attribute") {
            let id = ld.required(a, "id")?.to_owned();
            let title = a.attr("title").unwrap_or(&id).to_owned();
            let kind = Kind::from_type(a.attr("type").unwrap_or("string"));
            let default = a.child("default").map(|d| d.text.clone());
            decls.entry(if class == "edge" { "edge" } else { "node" }).or_default().insert(id, AttrDecl { title, kind, default });
        }
    }
    let empty = BTreeMap::new();
    let attvalues = |el: &Element| -> Vec<(String, String, usize)> {
        el.child("attvalues")
            .map(|av| {
                av.children("attvalue")
                    .map(|v| {
                        let key = v.attr("for").or(v.attr("id")).unwrap_or_default().to_owned();
                        (key, v.attr("value").unwrap_or_default().to_owned(), v.offset)
                    })
                    .collect()
            })
            .unwrap_or_default()
    };

    for nodes in graph.children("nodes") {
        for n in nodes.children("node") {
            reject_nested(src, n)?;
            let id = ld.required(n, "id")?;
            let (attrs, ts) = ld.values(n, decls.get("node").unwrap_or(&empty), &attvalues(n))?;
            ld.add_node(n, id, n.attr("label").map(str::to_owned), attrs, ts)?;
        }
    }
    for edges in graph.children("edges") {
        for e in edges.children("edge") {
            let (u, v) = (ld.endpoint(e, "source")?, ld.endpoint(e, "target")?);
            let weight = e.attr("weight").map(|w| ld.weight(e, w)).transpose()?.unwrap_or(1.0);
            let (attrs, mut ts) = ld.values(e, decls.get("edge").unwrap_or(&empty), &attvalues(e))?;
            if let Some(raw) = e.attr("timestamp") {
                ts = Some(ld.timestamp(e, raw)?);
            }
            ld.g.merge_edge(u, v, weight, ts, attrs);
        }
    }
    Ok(ld.g)
}

pub(crate) fn parse_graphml(src: &str) -> Result<Graph, IoError> {
    let root = parse_tree(src)?;
    if root.name != "graphml" {
        return Err(error_at(src, root.offset, format!("expected <graphml>, found <{}>", root.name)));
    }
    let graph = root.child("graph").ok_or_else(|| error_at(src, root.offset, "<graphml> without <graph>"))?;
    let mut ld = Loader::new(src);
    ld.g.set_directed(graph.attr("edgedefault") == Some("directed"));

    let mut node_keys = BTreeMap::new();
    let mut edge_keys = BTreeMap::new();
    for k in root.children("key").chain(graph.children("key")) {
        let id = ld.required(k, "id")?.to_owned();
        let decl = AttrDecl {
            title: k.attr("attr.name").unwrap_or(&id).to_owned(),
            kind: Kind::from_type(k.attr("attr.type").unwrap_or("string")),
            default: k.child("default").map(|d| d.text.clone()),
        };
        match k.attr("for").unwrap_or("all") {
            "node" => {
                node_keys.insert(id, decl);
            }
            "edge" => {
                edge_keys.insert(id, decl);
            }
            "all" => {
                node_keys.insert(id.clone(), decl.clone());
                edge_keys.insert(id, decl);
            }
            _ => {}
        }
    }
    let data = |el: &Element| -> Vec<(String, String, usize)> {
        el.children("data").map(|d| (d.attr("key").unwrap_or_default().to_owned(), d.text.clone(), d.offset)).collect()
    };
    // Label and weight keys map to record fields rather than attributes.
    let split_field = |keys: &BTreeMap<String, AttrDecl>, given: &mut Vec<(String, String, usize)>, names: &[&str]| -> Option<(String, usize)> {
        let ids: Vec<&String> = keys.iter().filter(|(_, d)| names.contains(&d.title.as_str())).map(|(id, _)| id).collect();
        let pos = given.iter().position(|(k, _, _)| ids.contains(&k))?;
        let (_, v, off) = given.remove(pos);
        Some((v, off))
    };
    let field_default = |keys: &BTreeMap<String, AttrDecl>, names: &[&str]| keys.values().find(|d| names.contains(&d.title.as_str())).and_then(|d| d.default.clone());
    let plain = |keys: &BTreeMap<String, AttrDecl>, names: &[&str]| -> BTreeMap<String, AttrDecl> {
        keys.iter().filter(|(_, d)| !names.contains(&d.title.as_str())).map(|(k, d)| (k.clone(), d.clone())).collect()
    };
    const LABEL: &[&str] = &["label", "name"];
    const WEIGHT: &[&str] = &["weight"];
    let node_plain = plain(&node_keys, LABEL);
    let edge_plain = plain(&edge_keys, WEIGHT);

    for n in graph.children("node") {
        reject_nested(src, n)?;
        let id = ld.required(n, "id")?;
        let mut given = data(n);
        let label = split_field(&node_keys, &mut given, LABEL).map(|(v, _)| v).or_else(|| field_default(&node_keys, LABEL));
        let known: Vec<_> = given.into_iter().filter(|(k, _, _)| node_plain.contains_key(k) || !node_keys.contains_key(k)).collect();
        let (attrs, ts) = ld.values(n, &node_plain, &known)?;
        ld.add_node(n, id, label, attrs, ts)?;
    }
    for e in graph.children("edge") {
        let (u, v) = (ld.endpoint(e, "source")?, ld.endpoint(e, "target")?);
        let mut given = data(e);
        let weight = match split_field(&edge_keys, &mut given, WEIGHT).or_else(|| field_default(&edge_keys, WEIGHT).map(|d| (d, e.offset))) {
            Some((raw, _)) => ld.weight(e, &raw)?,
            None => 1.0,
        };
        let known: Vec<_> = given.into_iter().filter(|(k, _, _)| edge_plain.contains_key(k) || !edge_keys.contains_key(k)).collect();
        let (attrs, ts) = ld.values(e, &edge_plain, &known)?;
        ld.g.merge_edge(u, v, weight, ts, attrs);
    }
    if let Some(h) = graph.child("hyperedge") {
        return Err(error_at(src, h.offset, "hyperedges are not supported"));
    }
    Ok(ld.g)
}

/// Attribute columns of one record class: `(key, kind)` in key order, plus
/// whether any record has a timestamp.
fn columns<'a>(records: Vec<(&'a Attributes, Option<i64>)>) -> (Vec<(&'a str, Kind)>, bool) {
    let mut keys: BTreeMap<&str, Vec<AttrValue>> = BTreeMap::new();
    for (attrs, _) in &records {
        for (k, v) in *attrs {
            if !is_time_key(k) {
                keys.entry(k).or_default().push(v.clone());
            }
        }
    }
    let timed = records.iter().any(|(_, t)| t.is_some());
    (keys.into_iter().map(|(k, vs)| (k, Kind::of(vs.into_iter()))).collect(), timed)
}

fn type_name(kind: Kind, gexf: bool) -> &'static str {
    match (kind, gexf) {
        (Kind::Number, _) => "double",
        (Kind::Bool, _) => "boolean",
        (Kind::Text, _) => "string",
    }
}

pub(crate) fn write_gexf(g: &Graph) -> String {
    let (node_cols, node_timed) = columns(g.nodes().map(|n| (&n.attributes, n.timestamp)).collect());
    let (edge_cols, edge_timed) = columns(g.edges().map(|e| (&e.attributes, e.timestamp)).collect());
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    let edge_type = if g.is_directed() { "directed" } else { "undirected" };
    out.push_str(&format!("  <graph defaultedgetype=\"{edge_type}\" mode=\"static\">\n"));
    for (class, cols, timed) in [("node", &node_cols, node_timed), ("edge", &edge_cols, edge_timed)] {
        if cols.is_empty() && !timed {
            continue;
        }
        out.push_str(&format!("    <attributes class=\"{class}\">\n"));
        for (i, (k, kind)) in cols.iter().enumerate() {
            out.push_str(&format!("      <attribute id=\"{i}\" title=\"{}\" type=\"{}\"/>\n", esc(k), type_name(*kind, true)));
        }
        if timed {
            out.push_str(&format!("      <attribute id=\"{}\" title=\"timestamp\" type=\"long\"/>\n", cols.len()));
        }
        out.push_str("    </attributes>\n");
    }
    let attvalues = |out: &mut String, cols: &[(&str, Kind)], attrs: &Attributes, ts: Option<i64>| {
        let mut vals: Vec<(usize, String)> = cols
            .iter()
            .enumerate()
            .filter_map(|(i, (k, _))| attrs.get(*k).map(|v| (i, text_of(v))))
            .collect();
        if let Some(t) = ts {
            vals.push((cols.len(), t.to_string()));
        }
        if vals.is_empty() {
            return false;
        }
        out.push_str(">\n        <attvalues>\n");
        for (i, v) in vals {
            out.push_str(&format!("          <attvalue for=\"{i}\" value=\"{}\"/>\n", esc(&v)));
        }
        out.push_str("        </attvalues>\n");
        true
    };
    out.push_str("    <nodes>\n");
    for n in g.nodes() {
        out.push_str(&format!("      <node id=\"{}\" label=\"{}\"", n.id, esc(&n.label)));
        if attvalues(&mut out, &node_cols, &n.attributes, n.timestamp) {
            out.push_str("      </node>\n");
        } else {
            out.push_str("/>\n");
        }
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for e in g.edges() {
        out.push_str(&format!("      <edge id=\"{}\" source=\"{}\" target=\"{}\" weight=\"{}\"", e.id, e.u, e.v, fmt_num(e.weight)));
        if attvalues(&mut out, &edge_cols, &e.attributes, e.timestamp) {
            out.push_str("      </edge>\n");
        } else {
            out.push_str("/>\n");
        }
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

pub(crate) fn write_graphml(g: &Graph) -> String {
    let (node_cols, node_timed) = columns(g.nodes().map(|n| (&n.attributes, n.timestamp)).collect());
    let (edge_cols, edge_timed) = columns(g.edges().map(|e| (&e.attributes, e.timestamp)).collect());
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    if node_timed {
        out.push_str("  <key id=\"nt\" for=\"node\" attr.name=\"timestamp\" attr.type=\"long\"/>\n");
    }
    if edge_timed {
        out.push_str("  <key id=\"et\" for=\"edge\" attr.name=\"timestamp\" attr.type=\"long\"/>\n");
    }
    for (prefix, class, cols) in [("n", "node", &node_cols), ("e", "edge", &edge_cols)] {
        for (i, (k, kind)) in cols.iter().enumerate() {
            if (class == "node" && ["label", "name"].contains(k)) || (class == "edge" && *k == "weight") {
                continue;
            }
            out.push_str(&format!(
                "  <key id=\"{prefix}{i}\" for=\"{class}\" attr.name=\"{}\" attr.type=\"{}\"/>\n",
                esc(k),
                type_name(*kind, false)
            ));
        }
    }
    let edge_default = if g.is_directed() { "directed" } else { "undirected" };
    out.push_str(&format!("  <graph id=\"G\" edgedefault=\"{edge_default}\">\n"));
    let data = |out: &mut String, prefix: &str, cols: &[(&str, Kind)], attrs: &Attributes, skip: &[&str]| {
        for (i, (k, _)) in cols.iter().enumerate() {
            if skip.contains(k) {
                continue;
            }
            if let Some(v) = attrs.get(*k) {
                out.push_str(&format!("      <data key=\"{prefix}{i}\">{}</data>\n", esc(&text_of(v))));
            }
        }
    };
    for n in g.nodes() {
        out.push_str(&format!("    <node id=\"n{}\">\n      <data key=\"label\">{}</data>\n", n.id, esc(&n.label)));
        if let Some(t) = n.timestamp {
            out.push_str(&format!("      <data key=\"nt\">{t}</data>\n"));
        }
        data(&mut out, "n", &node_cols, &n.attributes, &["label", "name"]);
        out.push_str("    </node>\n");
    }
    for e in g.edges() {
        out.push_str(&format!(
            "    <edge id=\"e{}\" source=\"n{}\" target=\"n{}\">\n      <data key=\"weight\">{}</data>\n",
            e.id,
            e.u,
            e.v,
            fmt_num(e.weight)
        ));
        if let Some(t) = e.timestamp {
            out.push_str(&format!("      <data key=\"et\">{t}</data>\n"));
        }
        data(&mut out, "e", &edge_cols, &e.attributes, &["weight"]);
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
