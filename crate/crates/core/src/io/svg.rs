//! SVG 1.1 rendering of a laid-out graph.
//!
//! Output is byte-stable for identical inputs: edges are drawn first in
//! ascending edge id, then nodes in ascending node id, and every number is
//! printed with two decimals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::graph::{Graph, NodeId};
use crate::measure::{MeasureKey, NodeMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub type LayoutMap = BTreeMap<NodeId, Point>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorBy {
    Measure(MeasureKey),
    /// A `#rgb`/`#rrggbb` colour or a named colour.
    Constant(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeBy {
    Measure(MeasureKey),
    /// Radius in pixels.
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct StyleSpec {
    pub color_by: ColorBy,
    pub size_by: SizeBy,
    /// Radius range in pixels used by measure-driven sizing.
    pub node_size: (f64, f64),
    pub edge_opacity: f64,
    pub background: String,
    pub width: f64,
    pub height: f64,
}

impl Default for StyleSpec {
    fn default() -> Self {
        Self {
            color_by: ColorBy::Constant("#4682b4".into()),
            size_by: SizeBy::Constant(5.0),
            node_size: (3.0, 12.0),
            edge_opacity: 0.6,
            background: "#ffffff".into(),
            width: 800.0,
            height: 600.0,
        }
    }
}

fn valid_color(c: &str) -> bool {
    match c.strip_prefix('#') {
        Some(hex) => matches!(hex.len(), 3 | 6) && hex.bytes().all(|b| b.is_ascii_hexdigit()),
        None => !c.is_empty() && c.len() <= 32 && c.bytes().all(|b| b.is_ascii_alphabetic()),
    }
}

impl StyleSpec {
    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |m: &str| Err(IoError::InvalidStyle(m.to_owned()));
        let (lo, hi) = self.node_size;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad("node size range must be positive with min <= max");
        }
        if let SizeBy::Constant(r) = self.size_by {
            if !(r.is_finite() && r > 0.0) {
                return bad("constant node size must be positive");
            }
        }
        if !(0.0..=1.0).contains(&self.edge_opacity) {
            return bad("edge opacity must lie in [0, 1]");
        }
        if !(self.width.is_finite() && self.height.is_finite() && self.width > 0.0 && self.height > 0.0) {
            return bad("canvas size must be positive");
        }
        if !valid_color(&self.background) {
            return bad("invalid background colour");
        }
        if let ColorBy::Constant(c) = &self.color_by {
            if !valid_color(c) {
                return bad("invalid node colour");
            }
        }
        Ok(())
    }
}

/// Maps `t` in [0, 1] from blue (hue 240) to red (hue 0) as `#rrggbb`.
pub fn hue_color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let h = 240.0 * (1.0 - t);
    let (s, l) = (0.75, 0.5);
    let c = (1.0 - (2.0 * l - 1.0f64).abs()) * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        _ => (x, 0.0, c),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

/// Nodes on the unit circle in ascending id order.
pub fn circular_layout(g: &Graph) -> LayoutMap {
    let n = g.node_count();
    g.node_ids()
        .enumerate()
        .map(|(i, id)| {
            if n == 1 {
                return (id, Point { x: 0.0, y: 0.0 });
            }
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            (id, Point { x: a.cos(), y: a.sin() })
        })
        .collect()
}

/// Normalized position of each node's value in the measure's range; a
/// constant measure maps everything to the middle.
fn scale<'a>(key: MeasureKey, measures: &'a BTreeMap<MeasureKey, NodeMeasure>) -> Result<impl Fn(NodeId) -> f64 + 'a, IoError> {
    let m = measures.get(&key).ok_or_else(|| IoError::MissingMeasure(key.as_str().to_owned()))?;
    let (lo, hi) = crate::measure::min_max(m.values.values().copied().filter(|v| v.is_finite())).unwrap_or((0.0, 0.0));
    Ok(move |id: NodeId| {
        let v = m.get(id);
        if hi > lo && v.is_finite() {
            (v - lo) / (hi - lo)
        } else {
            0.5
        }
    })
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn export_svg(g: &Graph, layout: &LayoutMap, style: &StyleSpec, measures: &BTreeMap<MeasureKey, NodeMeasure>) -> Result<String, IoError> {
    style.validate()?;
    for id in g.node_ids() {
        let p = layout.get(&id).ok_or(IoError::MissingLayout(id))?;
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(IoError::InvalidLayout(id));
        }
    }
    let color: Box<dyn Fn(NodeId) -> String> = match &style.color_by {
        ColorBy::Measure(k) => {
            let s = scale(*k, measures)?;
            Box::new(move |id| hue_color(s(id)))
        }
        ColorBy::Constant(c) => Box::new(move |_| c.clone()),
    };
    let (rmin, rmax) = style.node_size;
    let radius: Box<dyn Fn(NodeId) -> f64> = match &style.size_by {
        SizeBy::Measure(k) => {
            let s = scale(*k, measures)?;
            Box::new(move |id| rmin + s(id) * (rmax - rmin))
        }
        SizeBy::Constant(r) => {
            let r = *r;
            Box::new(move |_| r)
        }
    };

    // Fit the layout's bounding box into the canvas, keeping aspect ratio.
    let pts = || g.node_ids().map(|id| layout[&id]);
    let (x0, x1) = crate::measure::min_max(pts().map(|p| p.x)).unwrap_or((0.0, 0.0));
    let (y0, y1) = crate::measure::min_max(pts().map(|p| p.y)).unwrap_or((0.0, 0.0));
    let margin = rmax.max(if let SizeBy::Constant(r) = style.size_by { r } else { 0.0 }) + 2.0;
    let (w, h) = (style.width, style.height);
    let span = ((x1 - x0) / (w - 2.0 * margin).max(1.0)).max((y1 - y0) / (h - 2.0 * margin).max(1.0));
    let k = if span > 0.0 { 1.0 / span } else { 1.0 };
    let place = |id: NodeId| {
        let p = layout[&id];
        (w / 2.0 + (p.x - (x0 + x1) / 2.0) * k, h / 2.0 + (p.y - (y0 + y1) / 2.0) * k)
    };

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.2}\" height=\"{h:.2}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n"
    ));
    out.push_str(&format!("<rect x=\"0\" y=\"0\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{}\"/>\n", style.background));
    out.push_str(&format!("<g stroke=\"#999999\" stroke-opacity=\"{:.2}\" stroke-width=\"1\">\n", style.edge_opacity));
    for e in g.edges() {
        let ((ax, ay), (bx, by)) = (place(e.u), place(e.v));
        out.push_str(&format!("<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\"/>\n"));
    }
    out.push_str("</g>\n<g stroke=\"#ffffff\" stroke-width=\"1\">\n");
    for n in g.nodes() {
        let (x, y) = place(n.id);
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.2}\" fill=\"{}\"><title>{}</title></circle>\n",
            radius(n.id),
            color(n.id),
            esc(&n.label)
        ));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{complete, star};

    fn degree(g: &Graph) -> BTreeMap<MeasureKey, NodeMeasure> {
        let m = NodeMeasure {
            measure: MeasureKey::Degree,
            values: g.node_ids().map(|id| (id, g.degree(id) as f64)).collect(),
            exact: true,
        };
        BTreeMap::from([(MeasureKey::Degree, m)])
    }

    fn count(s: &str, tag: &str) -> usize {
        s.matches(tag).count()
    }

    #[test]
    fn element_counts() {
        let g = complete(1);
        let svg = export_svg(&g, &circular_layout(&g), &StyleSpec::default(), &BTreeMap::new()).unwrap();
        assert_eq!((count(&svg, "<circle "), count(&svg, "<line ")), (1, 0));
        let g = complete(3);
        let svg = export_svg(&g, &circular_layout(&g), &StyleSpec::default(), &BTreeMap::new()).unwrap();
        assert_eq!((count(&svg, "<circle "), count(&svg, "<line ")), (3, 3));
        assert!(svg.find("<line ").unwrap() < svg.find("<circle ").unwrap());
    }

    #[test]
    fn degree_colouring_separates_star_center() {
        let g = star(3);
        let style = StyleSpec {
            color_by: ColorBy::Measure(MeasureKey::Degree),
            size_by: SizeBy::Measure(MeasureKey::Degree),
            ..StyleSpec::default()
        };
        let svg = export_svg(&g, &circular_layout(&g), &style, &degree(&g)).unwrap();
        let fills: Vec<&str> = svg.match_indices("fill=\"#").map(|(i, _)| &svg[i + 6..i + 13]).skip(1).collect();
        assert_eq!(fills.len(), 4);
        assert_eq!(fills[0], hue_color(1.0));
        assert!(fills[1..].iter().all(|f| *f == hue_color(0.0)));
        assert_ne!(fills[0], fills[1]);
    }

    #[test]
    fn hue_endpoints() {
        assert_eq!(hue_color(0.0), "#2020df");
        assert_eq!(hue_color(1.0), "#df2020");
    }

    #[test]
    fn errors() {
        let g = complete(2);
        let mut layout = circular_layout(&g);
        let style = StyleSpec::default();
        let none = BTreeMap::new();
        let with_measure = StyleSpec { color_by: ColorBy::Measure(MeasureKey::Degree), ..StyleSpec::default() };
        assert!(matches!(export_svg(&g, &layout, &with_measure, &none), Err(IoError::MissingMeasure(_))));
        let bad = StyleSpec { node_size: (5.0, 1.0), ..StyleSpec::default() };
        assert!(matches!(export_svg(&g, &layout, &bad, &none), Err(IoError::InvalidStyle(_))));
        let bad = StyleSpec { background: "red\" onload=\"x".into(), ..StyleSpec::default() };
        assert!(matches!(export_svg(&g, &layout, &bad, &none), Err(IoError::InvalidStyle(_))));
        layout.insert(NodeId(1), Point { x: f64::NAN, y: 0.0 });
        assert!(matches!(export_svg(&g, &layout, &style, &none), Err(IoError::InvalidLayout(NodeId(1)))));
        layout.remove(&NodeId(1));
        assert!(matches!(export_svg(&g, &layout, &style, &none), Err(IoError::MissingLayout(NodeId(1)))));
    }

    #[test]
    fn deterministic() {
        let g = star(4);
        let a = export_svg(&g, &circular_layout(&g), &StyleSpec::default(), &BTreeMap::new()).unwrap();
        let b = export_svg(&g, &circular_layout(&g), &StyleSpec::default(), &BTreeMap::new()).unwrap();
        assert_eq!(a, b);
    }
}
