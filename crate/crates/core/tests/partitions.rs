use std::collections::BTreeMap;

use graphvis_core::analytics::kcore;
use graphvis_core::partitions::{coloring, communities_label_propagation, modularity, roles, Partition};
use graphvis_core::{Graph, NodeId};
use graphvis_oracles::strategies::{from_pairs, graph};
use graphvis_oracles::{is_proper_coloring, refines_components};
use proptest::prelude::*;

fn dense(p: &Partition) -> bool {
    let mut seen: Vec<usize> = p.assignment.values().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    seen == (0..p.group_count).collect::<Vec<_>>()
}

/// Same set partition, ignoring group names.
fn same_grouping(a: &BTreeMap<NodeId, usize>, b: &BTreeMap<NodeId, usize>, map: impl Fn(NodeId) -> NodeId) -> bool {
    let ids: Vec<NodeId> = a.keys().copied().collect();
    ids.iter().all(|&u| ids.iter().all(|&v| (a[&u] == a[&v]) == (b[&map(u)] == b[&map(v)])))
}

fn permuted(g: &Graph, perm: &[usize]) -> Graph {
    let pairs: Vec<(usize, usize)> = g.edges().map(|e| (perm[e.u.0 as usize], perm[e.v.0 as usize])).collect();
    from_pairs(g.node_count(), &pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn communities_refine_components(g in graph(60), seed in any::<u64>()) {
        let p = communities_label_propagation(&g, seed, 100);
        prop_assert!(refines_components(&g, &p.assignment));
        prop_assert_eq!(p.assignment.len(), g.node_count());
        prop_assert!(dense(&p));
        let q = p.quality.unwrap();
        prop_assert!((q - modularity(&g, &p.assignment)).abs() < 1e-12);
    }

    #[test]
    fn fixed_seeds_reproduce_partitions(g in graph(60), seed in any::<u64>(), k in 1usize..5) {
        prop_assert_eq!(communities_label_propagation(&g, seed, 100), communities_label_propagation(&g, seed, 100));
        if k <= g.node_count() {
            prop_assert_eq!(roles(&g, k, seed).unwrap(), roles(&g, k, seed).unwrap());
        }
        prop_assert_eq!(coloring(&g), coloring(&g));
    }

    #[test]
    fn coloring_partition_is_proper(g in graph(60)) {
        let p = coloring(&g);
        prop_assert!(is_proper_coloring(&g, &p.assignment));
        prop_assert!(p.group_count as u64 <= kcore(&g).max + 1);
        prop_assert!(dense(&p));
    }

    #[test]
    fn trivial_partition_has_zero_modularity(g in graph(40)) {
        let all: BTreeMap<NodeId, usize> = g.node_ids().map(|v| (v, 0)).collect();
        prop_assert!(modularity(&g, &all).abs() < 1e-12);
    }

    #[test]
    fn roles_ignore_node_numbering(g in graph(16), seed in any::<u64>(), k in 1usize..4, shuffle in any::<u64>()) {
        prop_assume!(k <= g.node_count());
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        use rand::{seq::SliceRandom, SeedableRng};
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let h = permuted(&g, &perm);
        let a = roles(&g, k, seed).unwrap();
        let b = roles(&h, k, seed).unwrap();
        prop_assert_eq!(a.group_count, b.group_count);
        prop_assert!(same_grouping(&a.assignment, &b.assignment, |v| NodeId(perm[v.0 as usize] as u64)));
    }
}
