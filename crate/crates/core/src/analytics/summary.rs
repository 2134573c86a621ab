use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::cache::{ComputeOptions, StatsCache};
use crate::graph::Graph;
use crate::measure::MeasureKey;
use crate::partitions::PartitionMethod;

/// `(mean, max, mode, sum, var)` of a node measure. Variance is the
/// population variance; the mode is the smallest of the most frequent values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean: f64,
    pub max: f64,
    pub mode: f64,
    pub sum: f64,
    pub var: f64,
}

/// Aggregates over `values`; all zero for an empty input.
pub fn aggregate(values: impl IntoIterator<Item = f64>) -> Aggregates {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return Aggregates::default();
    }
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let sum: f64 = v.iter().sum();
    let mean = sum / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;

    let (mut mode, mut best) = (v[0], 0usize);
    let mut i = 0;
    while i < v.len() {
        let j = i + v[i..].iter().take_while(|&&x| x == v[i]).count();
        if j - i > best {
            best = j - i;
            mode = v[i];
        }
        i = j;
    }
    Aggregates {
        mean,
        max: v[v.len() - 1],
        mode,
        sum,
        var,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MacroSummary {
    pub version: u64,
    pub node_count: usize,
    pub edge_count: usize,
    pub max_degree: u64,
    pub avg_degree: f64,
    pub total_triangles: u64,
    pub global_clustering: f64,
    pub max_kcore: u64,
    pub diameter: f64,
    pub mean_distance: f64,
    pub approx_chromatic_number: u64,
    pub max_triangle_core: u64,
    pub component_count: usize,
    /// Present only once a community partition was computed for this version.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub community_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_count: Option<usize>,
    pub aggregates: BTreeMap<MeasureKey, Aggregates>,
    /// Fields whose value came from sampled sources.
    pub approximate: BTreeMap<String, bool>,
}

/// Node measures always aggregated in the summary; betweenness is added when
/// it is already cached because it is the only expensive one.
const SUMMARY_NODE_MEASURES: &[MeasureKey] = &[
    MeasureKey::Degree,
    MeasureKey::Triangles,
    MeasureKey::LocalClustering,
    MeasureKey::Kcore,
    MeasureKey::Eccentricity,
    MeasureKey::Pagerank,
];

pub fn macro_summary(g: &Graph, cache: &mut StatsCache, opts: &ComputeOptions) -> Result<MacroSummary, AnalyticsError> {
    let scalar = |cache: &mut StatsCache, key| -> Result<(f64, bool), AnalyticsError> {
        let e = cache.ensure(g, key, opts)?;
        Ok((e.values.as_scalar().unwrap_or(0.0), e.exact))
    };
    let (total, _) = scalar(cache, MeasureKey::TotalTriangles)?;
    let (global, _) = scalar(cache, MeasureKey::GlobalClustering)?;
    let (max_kcore, _) = scalar(cache, MeasureKey::MaxKcore)?;
    let (diameter, diameter_exact) = scalar(cache, MeasureKey::Diameter)?;
    let (mean_distance, mean_exact) = scalar(cache, MeasureKey::MeanDistance)?;
    let (components, _) = scalar(cache, MeasureKey::ComponentCount)?;
    let (colors, _) = scalar(cache, MeasureKey::ColorCount)?;
    let (max_tc, _) = scalar(cache, MeasureKey::MaxTriangleCore)?;

    let mut keys = SUMMARY_NODE_MEASURES.to_vec();
    if cache.node_values(MeasureKey::Betweenness).is_some() && cache.get(MeasureKey::Betweenness).unwrap().computed_at == g.version() {
        keys.push(MeasureKey::Betweenness);
    }
    let mut aggregates = BTreeMap::new();
    let mut approximate = BTreeMap::from([
        ("diameter".to_owned(), !diameter_exact),
        ("mean-distance".to_owned(), !mean_exact),
    ]);
    for key in keys {
        let e = cache.ensure(g, key, opts)?;
        let values = e.values.as_node().map(|m| m.values().copied().collect::<Vec<_>>()).unwrap_or_default();
        if !e.exact {
            approximate.insert(key.as_str().to_owned(), true);
        }
        aggregates.insert(key, aggregate(values));
    }

    let n = g.node_count();
    let degree = aggregates[&MeasureKey::Degree];
    let count_of = |m| cache.partition(m).map(|p| p.group_count);
    Ok(MacroSummary {
        version: g.version(),
        node_count: n,
        edge_count: g.edge_count(),
        max_degree: degree.max as u64,
        avg_degree: degree.mean,
        total_triangles: total as u64,
        global_clustering: global,
        max_kcore: max_kcore as u64,
        diameter,
        mean_distance,
        approx_chromatic_number: colors as u64,
        max_triangle_core: max_tc as u64,
        component_count: components as usize,
        community_count: count_of(PartitionMethod::Community),
        role_count: count_of(PartitionMethod::Role),
        aggregates,
        approximate,
    })
}
