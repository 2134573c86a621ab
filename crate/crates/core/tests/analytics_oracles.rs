use std::collections::BTreeMap;

use graphvis_core::analytics::{
    betweenness, clustering, distances, greedy_color, kcore, pagerank, triangle_core, triangle_counts, PageRankParams, Sampling,
};
use graphvis_core::NodeId;
use graphvis_oracles as oracle;
use graphvis_oracles::strategies::graph;
use proptest::prelude::*;

fn as_u64<K: Ord + Copy>(m: &BTreeMap<K, f64>) -> BTreeMap<K, u64> {
    m.iter().map(|(&k, &v)| (k, v as u64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn triangles_match_subset_enumeration(g in graph(60)) {
        let got = triangle_counts(&g);
        let want = oracle::triangles(&g);
        prop_assert_eq!(got.total, want.total);
        prop_assert_eq!(as_u64(&got.nodes.values), want.nodes);
        prop_assert_eq!(as_u64(&got.edges.values), want.edges);
        let node_sum: f64 = got.nodes.values.values().sum();
        let edge_sum: f64 = got.edges.values.values().sum();
        prop_assert_eq!(node_sum as u64, 3 * got.total);
        prop_assert_eq!(edge_sum as u64, 3 * got.total);
    }

    #[test]
    fn clustering_matches_formulas(g in graph(40)) {
        let tri = triangle_counts(&g);
        let c = clustering(&g, &tri);
        let wedges = oracle::wedges(&g);
        prop_assert_eq!(c.wedges, wedges);
        let global = if wedges == 0 { 0.0 } else { 3.0 * tri.total as f64 / wedges as f64 };
        prop_assert!((c.global - global).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&c.global));
        for v in g.node_ids() {
            let d = g.degree(v) as f64;
            let want = if d < 2.0 { 0.0 } else { 2.0 * tri.nodes.get(v) / (d * (d - 1.0)) };
            prop_assert!((c.local.get(v) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn kcore_matches_exhaustive_search(g in graph(12)) {
        let k = kcore(&g);
        let want = oracle::kcore_exhaustive(&g);
        prop_assert_eq!(k.max, want.values().copied().max().unwrap_or(0));
        prop_assert_eq!(as_u64(&k.core.values), want);
    }

    #[test]
    fn kcore_matches_naive_peeling(g in graph(60)) {
        prop_assert_eq!(as_u64(&kcore(&g).core.values), oracle::kcore_naive(&g));
    }

    #[test]
    fn triangle_core_matches_naive_peeling(g in graph(40)) {
        let t = triangle_core(&g);
        let want = oracle::triangle_core(&g);
        prop_assert_eq!(t.max, want.values().copied().max().unwrap_or(0));
        prop_assert_eq!(as_u64(&t.values.values), want);
    }

    #[test]
    fn betweenness_matches_path_enumeration(g in graph(12)) {
        let got = betweenness(&g, &Sampling::exact()).unwrap();
        prop_assert!(got.exact);
        for (v, want) in oracle::betweenness(&g) {
            prop_assert!((got.get(v) - want).abs() < 1e-9, "node {v}: {} vs {want}", got.get(v));
        }
    }

    #[test]
    fn full_sampling_equals_exact_betweenness(g in graph(30), seed in any::<u64>()) {
        let n = g.node_count().max(1);
        let exact = betweenness(&g, &Sampling::exact()).unwrap();
        let sampled = betweenness(&g, &Sampling::sampled(n, seed)).unwrap();
        for v in g.node_ids() {
            prop_assert!((exact.get(v) - sampled.get(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn distances_match_floyd_warshall(g in graph(30)) {
        let d = distances(&g, &Sampling::exact());
        let want = oracle::distance_summary(&g);
        prop_assert_eq!(as_u64(&d.eccentricity.values), want.eccentricity);
        prop_assert_eq!(d.diameter, want.diameter as f64);
        prop_assert!((d.mean_distance - want.mean_distance).abs() < 1e-12);
        prop_assert_eq!(d.component_count, want.component_count);
        prop_assert!(d.diameter >= d.mean_distance);
    }

    #[test]
    fn pagerank_is_a_distribution(g in graph(50)) {
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        if g.node_count() > 0 {
            let sum: f64 = pr.measure.values.values().sum();
            prop_assert!((sum - 1.0).abs() < 1e-6);
        }
        prop_assert!(pr.measure.values.values().all(|&x| x >= 0.0));
        if !pr.converged {
            prop_assert!(!pr.measure.exact);
        }
        for w in pr.residuals.windows(2).skip(1) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "residuals {:?}", pr.residuals);
        }
    }

    #[test]
    fn greedy_coloring_is_proper_and_bounded(g in graph(60)) {
        let c = greedy_color(&g);
        let colors: BTreeMap<NodeId, usize> = c.colors.values.iter().map(|(&v, &x)| (v, x as usize)).collect();
        prop_assert!(oracle::is_proper_coloring(&g, &colors));
        prop_assert!(c.count <= kcore(&g).max + 1);
        let distinct: std::collections::BTreeSet<usize> = colors.values().copied().collect();
        prop_assert_eq!(distinct.len() as u64, c.count);
    }
}

#[test]
fn star_pagerank_matches_closed_form() {
    for leaves in [1, 3, 7, 20] {
        let g = oracle::strategies::from_pairs(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>());
        let params = PageRankParams { tol: 1e-12, max_iters: 1000, ..PageRankParams::default() };
        let pr = pagerank(&g, &params).unwrap();
        let (c, l) = oracle::star_pagerank(leaves, params.damping);
        assert!((pr.measure.get(NodeId(0)) - c).abs() < 1e-6);
        for i in 1..=leaves {
            assert!((pr.measure.get(NodeId(i as u64)) - l).abs() < 1e-6);
        }
    }
}
