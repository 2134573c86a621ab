//! Graph file formats: detection, parsing, writing and SVG export.
//!
//! Parsers share load semantics: self-loops are dropped, repeated pairs are
//! merged keeping the first occurrence, and node labels are preserved.
//! Writers are deterministic and emit nodes and edges in ascending id order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

mod edgelist;
mod gml;
mod json;
mod mtx;
mod pajek;
mod svg;
mod xml;

pub use svg::{circular_layout, export_svg, hue_color, ColorBy, LayoutMap, Point, SizeBy, StyleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatId {
    EdgelistTxt,
    EdgelistCsv,
    EdgelistTsv,
    Mtx,
    Gexf,
    Graphml,
    Gml,
    Json,
    Pajek,
}

impl FormatId {
    pub const ALL: [FormatId; 9] = [
        FormatId::EdgelistTxt,
        FormatId::EdgelistCsv,
        FormatId::EdgelistTsv,
        FormatId::Mtx,
        FormatId::Gexf,
        FormatId::Graphml,
        FormatId::Gml,
        FormatId::Json,
        FormatId::Pajek,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormatId::EdgelistTxt => "edgelist-txt",
            FormatId::EdgelistCsv => "edgelist-csv",
            FormatId::EdgelistTsv => "edgelist-tsv",
            FormatId::Mtx => "mtx",
            FormatId::Gexf => "gexf",
            FormatId::Graphml => "graphml",
            FormatId::Gml => "gml",
            FormatId::Json => "json",
            FormatId::Pajek => "pajek",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            FormatId::EdgelistTxt => "txt",
            FormatId::EdgelistCsv => "csv",
            FormatId::EdgelistTsv => "tsv",
            FormatId::Mtx => "mtx",
            FormatId::Gexf => "gexf",
            FormatId::Graphml => "graphml",
            FormatId::Gml => "gml",
            FormatId::Json => "json",
            FormatId::Pajek => "net",
        }
    }

    pub fn mime_type(self) -> &'static str {
        match self {
            FormatId::EdgelistCsv => "text/csv",
            FormatId::EdgelistTsv => "text/tab-separated-values",
            FormatId::Gexf | FormatId::Graphml => "application/xml",
            FormatId::Json => "application/json",
            _ => "text/plain",
        }
    }

    pub fn from_extension(ext: &str) -> Option<FormatId> {
        Some(match ext.to_ascii_lowercase().as_str() {
            "txt" | "edges" | "edgelist" | "el" => FormatId::EdgelistTxt,
            "csv" => FormatId::EdgelistCsv,
            "tsv" => FormatId::EdgelistTsv,
            "mtx" | "mm" => FormatId::Mtx,
            "gexf" => FormatId::Gexf,
            "graphml" => FormatId::Graphml,
            "gml" => FormatId::Gml,
            "json" => FormatId::Json,
            "net" | "pajek" | "paj" => FormatId::Pajek,
            _ => return None,
        })
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormatId {
    type Err = IoError;

    /// Accepts format names and file extensions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormatId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .or_else(|| FormatId::from_extension(s))
            .ok_or_else(|| IoError::UnknownFormat(format!("unrecognized format name '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        /// Byte offset into the input.
        offset: usize,
        message: String,
    },
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("layout has no entry for node {0}")]
    MissingLayout(NodeId),
    #[error("layout coordinates of node {0} are not finite")]
    InvalidLayout(NodeId),
    #[error("invalid style: {0}")]
    InvalidStyle(String),
    #[error("measure '{0}' was referenced by the style but not supplied")]
    MissingMeasure(String),
}

impl IoError {
    /// `(line, column)` of a parse error.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            IoError::Parse { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

/// Builds a parse error from a byte offset into `src`.
pub(crate) fn error_at(src: &str, offset: usize, message: impl Into<String>) -> IoError {
    let offset = offset.min(src.len());
    let before = &src.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    IoError::Parse {
        line,
        column: offset - line_start + 1,
        offset,
        message: message.into(),
    }
}

/// Iterates `(line number, byte offset of line start, line)` without line terminators.
pub(crate) fn lines(src: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    let mut offset = 0;
    src.split_inclusive('\n').enumerate().map(move |(i, raw)| {
        let start = offset;
        offset += raw.len();
        let line = raw.strip_suffix('\n').unwrap_or(raw);
        (i + 1, start, line.strip_suffix('\r').unwrap_or(line))
    })
}

fn decode(bytes: &[u8]) -> Result<&str, IoError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
        error_at(valid, valid.len(), "input is not valid UTF-8")
    })
}

fn first_data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('%'))
}

fn xml_root(text: &str) -> Option<String> {
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix("<?") {
            rest = &r[r.find("?>")? + 2..];
        } else if let Some(r) = rest.strip_prefix("<!--") {
            rest = &r[r.find("-->")? + 3..];
        } else if let Some(r) = rest.strip_prefix("<!") {
            rest = &r[r.find('>')? + 1..];
        } else if let Some(r) = rest.strip_prefix('<') {
            let name: String = r.chars().take_while(|c| !c.is_whitespace() && *c != '>' && *c != '/').collect();
            return Some(name.rsplit(':').next().unwrap_or_default().to_ascii_lowercase());
        } else {
            return None;
        }
    }
}

fn looks_like_gml(text: &str) -> bool {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .take(50)
        .collect::<Vec<_>>()
        .join("\n");
    let mut rest = body.as_str();
    while let Some(i) = rest.find("graph") {
        let before_ok = rest[..i].chars().next_back().is_none_or(|c| c.is_whitespace() || c == '[');
        let after = rest[i + 5..].trim_start();
        if before_ok && after.starts_with('[') {
            return true;
        }
        rest = &rest[i + 5..];
    }
    false
}

/// Picks a format from the file extension, falling back to content sniffing.
pub fn detect_format(filename: &str, head: &[u8]) -> Result<FormatId, IoError> {
    if head.is_empty() {
        return Err(IoError::UnknownFormat("empty input".into()));
    }
    if let Some(f) = filename.rsplit_once('.').and_then(|(_, ext)| FormatId::from_extension(ext)) {
        return Ok(f);
    }
    let head = head.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(head);
    let text = match std::str::from_utf8(head) {
        Ok(t) => t,
        // `head` may cut a multi-byte character; anything else is binary.
        Err(e) if e.error_len().is_none() && e.valid_up_to() > 0 => std::str::from_utf8(&head[..e.valid_up_to()]).expect("valid prefix"),
        Err(_) => return Err(IoError::UnknownFormat("input is not UTF-8 text".into())),
    };
    if text.contains('\0') {
        return Err(IoError::UnknownFormat("input is binary".into()));
    }
    let trimmed = text.trim_start();
    if trimmed.len() >= 14 && trimmed[..14].eq_ignore_ascii_case("%%MatrixMarket") {
        return Ok(FormatId::Mtx);
    }
    if trimmed.starts_with('<') {
        return match xml_root(trimmed).as_deref() {
            Some("gexf") => Ok(FormatId::Gexf),
            Some("graphml") => Ok(FormatId::Graphml),
            _ => Err(IoError::UnknownFormat("XML document is neither GEXF nor GraphML".into())),
        };
    }
    if trimmed.starts_with('{') {
        return Ok(FormatId::Json);
    }
    if first_data_lines(text).next().is_some_and(|l| {
        let l = l.to_ascii_lowercase();
        ["*vertices", "*network", "*edges", "*arcs"].iter().any(|k| l.starts_with(k))
    }) {
        return Ok(FormatId::Pajek);
    }
    if looks_like_gml(text) {
        return Ok(FormatId::Gml);
    }
    let mut data = first_data_lines(text).take(20).peekable();
    if data.peek().is_none() {
        return Err(IoError::UnknownFormat("no data lines".into()));
    }
    for line in data {
        if line.contains('\t') {
            return Ok(FormatId::EdgelistTsv);
        }
        if line.contains(',') {
            return Ok(FormatId::EdgelistCsv);
        }
        if line.split_whitespace().count() >= 2 {
            return Ok(FormatId::EdgelistTxt);
        }
    }
    Err(IoError::UnknownFormat("no line looks like an edge".into()))
}

/// Parses `bytes` as `fmt`. Node ids of the result are dense in file order.
pub fn parse(bytes: &[u8], fmt: FormatId) -> Result<Graph, IoError> {
    let text = decode(bytes)?;
    match fmt {
        FormatId::EdgelistTxt => edgelist::parse(text, edgelist::Dialect::Txt),
        FormatId::EdgelistCsv => edgelist::parse(text, edgelist::Dialect::Csv),
        FormatId::EdgelistTsv => edgelist::parse(text, edgelist::Dialect::Tsv),
        FormatId::Mtx => mtx::parse(text),
        FormatId::Gexf => xml::parse_gexf(text),
        FormatId::Graphml => xml::parse_graphml(text),
        FormatId::Gml => gml::parse(text),
        FormatId::Json => json::parse(text),
        FormatId::Pajek => pajek::parse(text),
    }
}

/// Detects the format of `bytes` and parses it.
pub fn load(filename: &str, bytes: &[u8]) -> Result<(Graph, FormatId), IoError> {
    let fmt = detect_format(filename, &bytes[..bytes.len().min(64 * 1024)])?;
    Ok((parse(bytes, fmt)?, fmt))
}

pub fn write(g: &Graph, fmt: FormatId) -> String {
    match fmt {
        FormatId::EdgelistTxt => edgelist::write(g, edgelist::Dialect::Txt),
        FormatId::EdgelistCsv => edgelist::write(g, edgelist::Dialect::Csv),
        FormatId::EdgelistTsv => edgelist::write(g, edgelist::Dialect::Tsv),
        FormatId::Mtx => mtx::write(g),
        FormatId::Gexf => xml::write_gexf(g),
        FormatId::Graphml => xml::write_graphml(g),
        FormatId::Gml => gml::write(g),
        FormatId::Json => json::write(g),
        FormatId::Pajek => pajek::write(g),
    }
}

/// Text of a number as written by every writer: shortest round-trip form.
pub(crate) fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Parses an integral timestamp, accepting integral reals.
pub(crate) fn parse_timestamp(s: &str) -> Option<i64> {
    s.parse::<i64>().ok().or_else(|| {
        let x: f64 = s.parse().ok()?;
        (x.is_finite() && x.fract() == 0.0 && x.abs() < 9.2e18).then_some(x as i64)
    })
}

pub(crate) fn is_time_key(k: &str) -> bool {
    matches!(k.to_ascii_lowercase().as_str(), "time" | "timestamp" | "ts")
}
