mod common;

use std::collections::BTreeSet;

use common::*;
use phylonet::hn::*;
use phylonet::newick::parse_rooted_tree;
use phylonet::random::{rooted_tree, taxon_names, unrooted_tree};
use phylonet::uhn::uhn_solve;
use phylonet::utc::rooted_tc;
use phylonet::{canonical_rooted, unroot, Limits, RootedTree, Taxon};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(s: &str) -> RootedTree {
    parse_rooted_tree(s).unwrap()
}

fn names(xs: &[&str]) -> Vec<Taxon> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Smallest `k` such that a network from plain generator attachment displays
/// every tree; no clusters, bounds or pruning.
fn brute_hn(trees: &[RootedTree], k_max: usize) -> Option<usize> {
    let limits = Limits::default();
    let taxa = trees[0].taxa();
    (0..=k_max).find(|&k| {
        enumerate_generators(k, &limits).unwrap().iter().any(|g| {
            g.node_sides.len() <= taxa.len()
                && attach_taxa(g, &taxa)
                    .unwrap()
                    .any(|n| trees.iter().all(|t| rooted_tc(&n, t).unwrap().is_some()))
        })
    })
}

#[test]
fn generator_shapes() {
    let limits = Limits::default();
    for k in 0..=3 {
        let gens = enumerate_generators(k, &limits).unwrap();
        if k <= 1 {
            assert_eq!(gens.len(), 1);
        }
        let canon: BTreeSet<&str> = gens.iter().map(|g| g.canonical()).collect();
        assert_eq!(canon.len(), gens.len());
        for g in &gens {
            assert!(g.edge_sides.len() <= (4 * k).saturating_sub(1).max(1));
            assert!(g.node_sides.len() <= k.max(1));
            assert_eq!(g.graph.reticulation_number(), k);
            assert!(g.graph.topological_order().is_some());
            let root = g.graph.root().unwrap();
            assert_eq!(g.graph.outdegree(root), 1);
            for v in g.graph.nodes().filter(|&v| v != root) {
                match g.graph.indegree(v) {
                    1 => assert!(g.graph.outdegree(v) == 2 || k == 0),
                    2 => assert!(g.graph.outdegree(v) <= 1),
                    d => panic!("indegree {d}"),
                }
            }
        }
    }
    assert!(matches!(enumerate_generators(4, &limits), Err(phylonet::Error::Guard { .. })));
}

#[test]
fn attaching_taxa() {
    let limits = Limits::default();
    let tree_gen = &enumerate_generators(0, &limits).unwrap()[0];
    let triples: BTreeSet<String> =
        attach_taxa(tree_gen, &names(&["x", "y", "z"])).unwrap().map(|n| canonical_rooted(&n)).collect();
    assert_eq!(triples.len(), 3);

    let one = &enumerate_generators(1, &limits).unwrap()[0];
    let nets: Vec<_> = attach_taxa(one, &names(&["x", "y"])).unwrap().collect();
    assert!(!nets.is_empty());
    for n in &nets {
        n.validate().unwrap();
        assert_eq!(n.reticulation_number(), 1);
    }
    let two = enumerate_generators(2, &limits).unwrap();
    let widest = two.iter().find(|g| g.node_sides.len() == 2).unwrap();
    assert!(attach_taxa(widest, &names(&["x"])).is_err());
}

#[test]
fn small_exact_values() {
    let limits = Limits::default();
    let t = r("((a,b),(c,d));");
    let sol = hn_exact(&[t.clone(), t.clone()], 3, &limits).unwrap().unwrap();
    assert_eq!(sol.value, 0);
    assert_eq!(canonical_rooted(&sol.network), canonical_rooted(&t));

    let sol = hn_exact(&[r("((x,y),z);"), r("((x,z),y);")], 3, &limits).unwrap().unwrap();
    assert_eq!(sol.value, 1);
    assert_eq!(sol.network.reticulation_number(), 1);
    assert!(hn_exact(&[r("((x,y),z);"), r("((x,z),y);")], 0, &limits).unwrap().is_none());
}

#[test]
fn six_taxon_rootings_need_three() {
    let limits = Limits::default();
    let trees = [r("(a,(b,(c,(d,(e,f)))));"), r("(e,(d,(f,(a,(c,b)))));")];
    assert!(hn_exact(&trees, 2, &limits).unwrap().is_none());
    let sol = hn_exact(&trees, 3, &limits).unwrap().unwrap();
    assert_eq!(sol.value, 3);
    assert_eq!(sol.network.reticulation_number(), 3);
    for (img, t) in sol.images.iter().zip(&trees) {
        assert!(img.verifies_rooted(&sol.network, t));
    }
}

#[test]
fn guards() {
    let limits = Limits::default();
    let taxa = taxon_names(7);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = loop {
        let (a, b) = (rooted_tree(&taxa, &mut rng), rooted_tree(&taxa, &mut rng));
        if phylonet::clusters(&a).intersection(&phylonet::clusters(&b)).all(|c| c.len() <= 1 || c.len() == 7) {
            break (a, b);
        }
    };
    assert!(matches!(hn_exact(&[a, b], 3, &limits), Err(phylonet::Error::Guard { .. })));
    let t = r("((a,b),c);");
    assert!(matches!(hn_exact(&[t.clone(), t], 4, &limits), Err(phylonet::Error::Guard { .. })));
}

#[test]
fn random_pairs_match_plain_attachment() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..25 {
        let taxa = taxon_names(rng.gen_range(3..=4));
        let trees = [rooted_tree(&taxa, &mut rng), rooted_tree(&taxa, &mut rng)];
        let sol = hn_exact(&trees, 3, &limits).unwrap().unwrap();
        let brute = brute_hn(&trees, 3).unwrap();
        // Leaf-only attachment cannot place a common cluster as one pendant
        // block, so it is exact only without nontrivial common clusters.
        let shared = phylonet::clusters(&trees[0])
            .intersection(&phylonet::clusters(&trees[1]))
            .any(|c| c.len() >= 2 && c.len() < taxa.len());
        if shared {
            assert!(sol.value <= brute, "pair {i}");
        } else {
            assert_eq!(sol.value, brute, "pair {i}");
        }
    }
}

#[test]
fn rooted_value_bounds_unrooted_value() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..30 {
        let taxa = taxon_names(5);
        let trees = [rooted_tree(&taxa, &mut rng), rooted_tree(&taxa, &mut rng)];
        let rooted = hn_exact(&trees, 3, &limits).unwrap().unwrap().value;
        let unrooted = uhn_solve(&unroot(&trees[0]), &unroot(&trees[1]), &limits).unwrap().value;
        assert!(unrooted <= rooted, "pair {i}");
    }
}

#[test]
fn exhaustive_oracle() {
    let limits = Limits::default();
    let (t1, t2) = (t(SIX_T1), t(SIX_T2));
    assert_eq!(uhn_exhaustive_oracle(&[t1.clone(), t2], 2, &limits).unwrap(), Some(1));
    assert_eq!(uhn_exhaustive_oracle(&[t1.clone(), t1], 2, &limits).unwrap(), Some(0));
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..10 {
        let taxa = taxon_names(5);
        let (a, b) = (unrooted_tree(&taxa, &mut rng), unrooted_tree(&taxa, &mut rng));
        let exact = uhn_solve(&a, &b, &limits).unwrap().value;
        let oracle = uhn_exhaustive_oracle(&[a, b], 2, &limits).unwrap();
        assert_eq!(oracle, (exact <= 2).then_some(exact), "pair {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Solutions for three trees display all of them with the stated count.
    #[test]
    fn solutions_verify(seed in any::<u64>(), n in 3usize..=5) {
        let limits = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taxa = taxon_names(n);
        let trees: Vec<RootedTree> = (0..3).map(|_| rooted_tree(&taxa, &mut rng)).collect();
        if let Some(sol) = hn_exact(&trees, 3, &limits).unwrap() {
            sol.network.validate().unwrap();
            prop_assert_eq!(sol.network.reticulation_number(), sol.value);
            for (img, t) in sol.images.iter().zip(&trees) {
                prop_assert!(img.verifies_rooted(&sol.network, t));
            }
            let pair = hn_exact(&trees[..2], 3, &limits).unwrap().unwrap();
            prop_assert!(pair.value <= sol.value);
        }
    }
}
