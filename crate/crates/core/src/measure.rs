use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, NodeId};

/// What a measure is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Node,
    Edge,
    Graph,
}

impl FromStr for Target {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "node" => Ok(Target::Node),
            "edge" => Ok(Target::Edge),
            "graph" => Ok(Target::Graph),
            _ => Err(UnknownMeasure(s.to_owned())),
        }
    }
}

/// How the cache keeps a measure current across mutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Patched in place by every mutation, proportional to the touched neighborhood.
    Incremental,
    /// Marked stale by topology changes and recomputed on demand.
    LazyRecompute,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown measure '{0}'")]
pub struct UnknownMeasure(pub String);

macro_rules! measure_keys {
    ($($variant:ident => $name:literal, $target:ident, $strategy:ident;)*) => {
        /// Identifier of every statistic the engine computes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum MeasureKey {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl MeasureKey {
            pub const ALL: &'static [MeasureKey] = &[$(MeasureKey::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(MeasureKey::$variant => $name,)*
                }
            }

            pub fn target(self) -> Target {
                match self {
                    $(MeasureKey::$variant => Target::$target,)*
                }
            }

            pub fn strategy(self) -> Strategy {
                match self {
                    $(MeasureKey::$variant => Strategy::$strategy,)*
                }
            }
        }

        impl FromStr for MeasureKey {
            type Err = UnknownMeasure;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(MeasureKey::$variant),)*
                    _ => Err(UnknownMeasure(s.to_owned())),
                }
            }
        }
    };
}

measure_keys! {
    Degree => "degree", Node, Incremental;
    Triangles => "triangles", Node, Incremental;
    LocalClustering => "local-clustering", Node, Incremental;
    Kcore => "kcore", Node, LazyRecompute;
    Betweenness => "betweenness", Node, LazyRecompute;
    Pagerank => "pagerank", Node, LazyRecompute;
    Eccentricity => "eccentricity", Node, LazyRecompute;
    Color => "color", Node, LazyRecompute;
    EdgeTriangles => "edge-triangles", Edge, Incremental;
    TriangleCore => "triangle-core", Edge, LazyRecompute;
    TotalTriangles => "total-triangles", Graph, Incremental;
    Wedges => "wedges", Graph, Incremental;
    GlobalClustering => "global-clustering", Graph, Incremental;
    MaxKcore => "max-kcore", Graph, LazyRecompute;
    MaxTriangleCore => "max-triangle-core", Graph, LazyRecompute;
    Diameter => "diameter", Graph, LazyRecompute;
    MeanDistance => "mean-distance", Graph, LazyRecompute;
    ComponentCount => "component-count", Graph, LazyRecompute;
    ColorCount => "color-count", Graph, LazyRecompute;
}

impl MeasureKey {
    /// Parses a measure id and checks it is defined for `target`.
    pub fn parse_for(target: Target, s: &str) -> Result<Self, UnknownMeasure> {
        let key: MeasureKey = s.parse()?;
        if key.target() == target {
            Ok(key)
        } else {
            Err(UnknownMeasure(s.to_owned()))
        }
    }

    pub fn for_target(target: Target) -> impl Iterator<Item = MeasureKey> {
        Self::ALL.iter().copied().filter(move |k| k.target() == target)
    }

    /// Measures that are produced by the same computation as `self`.
    pub fn group(self) -> &'static [MeasureKey] {
        use MeasureKey::*;
        match self {
            Degree | Triangles | LocalClustering | EdgeTriangles | TotalTriangles | Wedges | GlobalClustering => &[
                Degree,
                Triangles,
                LocalClustering,
                EdgeTriangles,
                TotalTriangles,
                Wedges,
                GlobalClustering,
            ],
            Kcore | MaxKcore => &[Kcore, MaxKcore],
            TriangleCore | MaxTriangleCore => &[TriangleCore, MaxTriangleCore],
            Betweenness => &[Betweenness],
            Pagerank => &[Pagerank],
            Eccentricity | Diameter | MeanDistance | ComponentCount => {
                &[Eccentricity, Diameter, MeanDistance, ComponentCount]
            }
            Color | ColorCount => &[Color, ColorCount],
        }
    }
}

impl fmt::Display for MeasureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-node statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMeasure {
    pub measure: MeasureKey,
    pub values: BTreeMap<NodeId, f64>,
    pub exact: bool,
}

/// Per-edge statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMeasure {
    pub measure: MeasureKey,
    pub values: BTreeMap<EdgeId, f64>,
    pub exact: bool,
}

impl NodeMeasure {
    pub fn get(&self, id: NodeId) -> f64 {
        self.values.get(&id).copied().unwrap_or(0.0)
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        min_max(self.values.values().copied())
    }
}

impl EdgeMeasure {
    pub fn get(&self, id: EdgeId) -> f64 {
        self.values.get(&id).copied().unwrap_or(0.0)
    }
}

pub(crate) fn min_max(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}
