//! Engine criteria: analytics against brute force, the incremental cache,
//! file formats, generators and partitions.

use std::collections::BTreeMap;
use std::path::Path;

use graphvis_core::analytics::{betweenness, kcore, pagerank, triangle_core, triangle_counts, PageRankParams, Sampling};
use graphvis_core::generators::{generate, BlockBase, BlockSpec, GeneratorSpec, Model, BLOCK_ATTR};
use graphvis_core::io::FormatId;
use graphvis_core::partitions::{coloring, communities_label_propagation, roles};
use graphvis_core::{AttrValue, Graph, NodeId};
use graphvis_oracles as oracle;
use graphvis_oracles::strategies::from_pairs;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn as_u64<K: Ord + Copy>(m: &BTreeMap<K, f64>) -> BTreeMap<K, u64> {
    m.iter().map(|(&k, &v)| (k, v as u64)).collect()
}

pub fn oracle_equivalence() -> Result<String, String> {
    let graphs = 200;
    for seed in 0..graphs {
        let g = oracle::random_graph(60, seed);
        let tri = triangle_counts(&g);
        let want = oracle::triangles(&g);
        ensure(tri.total == want.total, || format!("seed {seed}: {} triangles, oracle {}", tri.total, want.total))?;
        ensure(as_u64(&tri.nodes.values) == want.nodes, || format!("seed {seed}: node triangle counts differ"))?;
        ensure(as_u64(&tri.edges.values) == want.edges, || format!("seed {seed}: edge triangle counts differ"))?;
        ensure(as_u64(&triangle_core(&g).values.values) == oracle::triangle_core(&g), || format!("seed {seed}: triangle cores differ"))?;
        ensure(as_u64(&kcore(&g).core.values) == oracle::kcore_naive(&g), || format!("seed {seed}: k-cores differ from peeling"))?;
    }
    // Exhaustive subgraph search is exponential, so it gets its own small graphs.
    for seed in 0..graphs {
        let g = oracle::random_graph(12, seed + 10_000);
        ensure(as_u64(&kcore(&g).core.values) == oracle::kcore_exhaustive(&g), || format!("seed {seed}: k-cores differ from exhaustive search"))?;
    }
    Ok(format!("{graphs} graphs with n <= 60 and {graphs} with n <= 12 match the oracles exactly"))
}

/// Mutations per sequence.
const STEPS: usize = 12;

pub fn incremental_correctness() -> Result<String, String> {
    let sequences = 1_000;
    for seed in 0..sequences {
        oracle::mutations::run_sequence(seed, 200, STEPS)?;
    }
    Ok(format!("{sequences} sequences of {STEPS} steps on up to 200 nodes; every fresh entry equals recomputation"))
}

fn exact_betweenness(g: &Graph) -> Vec<f64> {
    let b = betweenness(g, &Sampling::exact()).expect("exact betweenness");
    g.node_ids().map(|v| b.get(v)).collect()
}

pub fn centrality() -> Result<String, String> {
    let star = |leaves: usize| from_pairs(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>());
    let complete = |n: usize| from_pairs(n, &(0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect::<Vec<_>>());
    // Pair counts by hand: a cut vertex on k pair paths scores k, and each
    // vertex of C4 carries half of the one pair it separates.
    let cases: Vec<(&str, Graph, Vec<f64>)> = vec![
        ("P3", from_pairs(3, &[(0, 1), (1, 2)]), vec![0.0, 1.0, 0.0]),
        ("star-5", star(5), vec![10.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("K3", complete(3), vec![0.0; 3]),
        ("K4", complete(4), vec![0.0; 4]),
        ("C4", from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]), vec![0.5; 4]),
    ];
    for (name, g, want) in &cases {
        let got = exact_betweenness(g);
        ensure(&got == want, || format!("{name} betweenness {got:?}, expected {want:?}"))?;
    }

    let params = PageRankParams::default();
    for seed in 0..100 {
        let g = oracle::random_graph(50, seed);
        if g.node_count() == 0 {
            continue;
        }
        let pr = pagerank(&g, &params).map_err(|e| e.to_string())?;
        let sum: f64 = pr.measure.values.values().sum();
        ensure((sum - 1.0).abs() <= 1e-6, || format!("seed {seed}: PageRank sums to {sum}"))?;
    }
    let mut worst: f64 = 0.0;
    for leaves in [1, 2, 3, 5, 7, 20, 50] {
        let pr = pagerank(&star(leaves), &params).map_err(|e| e.to_string())?;
        let (c, l) = oracle::star_pagerank(leaves, params.damping);
        worst = worst.max((pr.measure.get(NodeId(0)) - c).abs());
        for i in 1..=leaves {
            worst = worst.max((pr.measure.get(NodeId(i as u64)) - l).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("star PageRank off the closed form by {worst:e}"))?;
    Ok(format!("{} hand-enumerated betweenness cases exact; PageRank sums within 1e-6; star error {worst:.1e}", cases.len()))
}

pub fn parser_round_trips() -> Result<String, String> {
    let graphs = 100;
    for f in FormatId::ALL {
        for seed in 0..graphs {
            let g = oracle::labeled::random_labeled_graph(60, seed ^ 0xf0f0);
            oracle::roundtrip::check(&g, f).map_err(|e| format!("seed {seed}: {e}"))?;
        }
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let fixtures = oracle::roundtrip::check_malformed(&root)?;
    Ok(format!(
        "{} formats x {graphs} graphs round-trip; {fixtures} malformed fixtures report their positions",
        FormatId::ALL.len()
    ))
}

fn block_spec(sizes: &[usize], p: f64, q: f64, seed: u64) -> GeneratorSpec {
    let blocks = sizes.iter().map(|&size| BlockSpec { size, base: BlockBase::Er { p } }).collect();
    GeneratorSpec::new(Model::Block { blocks, q, q_matrix: None }, seed)
}

fn block_of(g: &Graph, v: NodeId) -> usize {
    match g.node(v).map(|n| &n.attributes[BLOCK_ATTR]) {
        Some(AttrValue::Number(x)) => *x as usize,
        other => panic!("block attribute {other:?}"),
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn gen(spec: &GeneratorSpec) -> Result<Graph, String> {
    generate(spec).map_err(|e| e.to_string())
}

pub fn generator_statistics() -> Result<String, String> {
    let mut notes = Vec::new();

    let (n, p, seeds) = (30usize, 0.2, 10_000u64);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts = (0..seeds).map(|s| gen(&GeneratorSpec::new(Model::Er { n, p }, s)).map(|g| g.edge_count() as f64)).collect::<Result<Vec<_>, _>>()?;
    let (mean, _) = mean_and_se(&counts);
    let se = (pairs * p * (1.0 - p) / seeds as f64).sqrt();
    let z = (mean - p * pairs) / se;
    ensure(z.abs() < 3.0, || format!("ER mean edge count {mean}, expected {} ({z:.2} SE)", p * pairs))?;
    notes.push(format!("ER z={z:.2}"));

    let weights: Vec<f64> = (0..50).map(|i| 1.0 + (i % 10) as f64).collect();
    let total: f64 = weights.iter().sum();
    let trials = 10_000;
    let mut degrees = vec![Vec::with_capacity(trials); weights.len()];
    for s in 0..trials as u64 {
        let g = gen(&GeneratorSpec::new(Model::Cl { weights: weights.clone() }, s))?;
        for v in g.node_ids() {
            degrees[v.0 as usize].push(g.degree(v) as f64);
        }
    }
    let mut worst: f64 = 0.0;
    for (u, &w) in weights.iter().enumerate() {
        // No self-pairs, so a node's expected degree is w - w^2 / S.
        let expected = w - w * w / total;
        let (mean, se) = mean_and_se(&degrees[u]);
        let z = (mean - expected) / se;
        ensure(z.abs() < 3.0, || format!("CL node {u}: mean degree {mean}, expected {expected} ({z:.2} SE)"))?;
        worst = worst.max(z.abs());
    }
    notes.push(format!("CL max |z|={worst:.2}"));

    let m = 2;
    for n in 3..=200usize {
        for s in 0..3 {
            let edges = gen(&GeneratorSpec::new(Model::Pa { n, m }, n as u64 * 7 + s))?.edge_count();
            ensure(edges == 3 + (n - 3) * m, || format!("PA n={n}: {edges} edges"))?;
        }
    }
    notes.push("PA exact".into());

    for s in 0..100u64 {
        let sizes: Vec<usize> = (0..2 + s as usize % 5).map(|b| 1 + (b * 7 + s as usize) % 20).collect();
        let g = gen(&block_spec(&sizes, 0.1 + (s % 9) as f64 / 10.0, 0.0, s))?;
        let comps = oracle::components(&g).len();
        ensure(comps >= sizes.len(), || format!("seed {s}: {comps} components for {} blocks", sizes.len()))?;
    }
    notes.push("q=0 blocks 100/100".into());

    let seeds = 100;
    let mut agreement = 0.0;
    for s in 0..seeds {
        let g = gen(&block_spec(&[50, 50], 0.2, 0.01, s))?;
        let truth: BTreeMap<NodeId, usize> = g.node_ids().map(|v| (v, block_of(&g, v))).collect();
        let p = communities_label_propagation(&g, s, 100);
        agreement += oracle::planted_agreement(&p.assignment, &truth);
    }
    let agreement = agreement / seeds as f64;
    ensure(agreement >= 0.9, || format!("planted blocks recovered with mean agreement {agreement:.3}"))?;
    notes.push(format!("planted agreement {agreement:.3}"));
    Ok(notes.join(", "))
}

pub fn partition_properties() -> Result<String, String> {
    let graphs = 300;
    for seed in 0..graphs {
        let g = oracle::random_graph(60, seed + 50_000);
        let p = communities_label_propagation(&g, seed, 100);
        ensure(oracle::refines_components(&g, &p.assignment), || format!("seed {seed}: communities cross components"))?;
        let c = coloring(&g);
        ensure(oracle::is_proper_coloring(&g, &c.assignment), || format!("seed {seed}: improper coloring"))?;
        let max_core = kcore(&g).max;
        ensure(c.group_count as u64 <= max_core + 1, || format!("seed {seed}: {} colors, max core {max_core}", c.group_count))?;

        ensure(communities_label_propagation(&g, seed, 100) == p, || format!("seed {seed}: communities not reproducible"))?;
        ensure(coloring(&g) == c, || format!("seed {seed}: coloring not reproducible"))?;
        let k = 1 + seed as usize % 4;
        if k <= g.node_count() {
            let r = roles(&g, k, seed).map_err(|e| e.to_string())?;
            ensure(roles(&g, k, seed).map_err(|e| e.to_string())? == r, || format!("seed {seed}: roles not reproducible"))?;
        }
    }
    Ok(format!("{graphs} graphs: communities refine components, colorings proper and bounded, all methods reproducible"))
}
