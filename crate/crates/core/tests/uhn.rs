mod common;

use std::collections::BTreeSet;

use common::*;
use phylonet::random::{taxon_names, unrooted_tree};
use phylonet::uhn::*;
use phylonet::utc::utc_oracle;
use phylonet::{unrooted_caterpillar, Limits, Taxon, UnrootedTree};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn forest(blocks: &[&[&str]]) -> AgreementForest {
    AgreementForest::new(blocks.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect())
}

/// Every set partition of `items`, by restricted-growth strings.
fn partitions(items: &[Taxon]) -> Vec<Vec<BTreeSet<Taxon>>> {
    fn go(i: usize, items: &[Taxon], cur: &mut Vec<BTreeSet<Taxon>>, out: &mut Vec<Vec<BTreeSet<Taxon>>>) {
        if i == items.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].insert(items[i].clone());
            go(i + 1, items, cur, out);
            cur[b].remove(&items[i]);
        }
        cur.push(BTreeSet::from([items[i].clone()]));
        go(i + 1, items, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, items, &mut Vec::new(), &mut out);
    out
}

fn brute_maf(t1: &UnrootedTree, t2: &UnrootedTree) -> usize {
    partitions(&t1.taxa())
        .into_iter()
        .filter(|p| is_agreement_forest(t1, t2, &AgreementForest::new(p.clone())).unwrap())
        .map(|p| p.len())
        .min()
        .unwrap()
}

#[test]
fn six_taxon_forests() {
    let (t1, t2) = (t(SIX_T1), t(SIX_T2));
    assert!(is_agreement_forest(&t1, &t2, &forest(&[&["a", "b", "c"], &["d", "e", "f"]])).unwrap());
    assert!(!is_agreement_forest(&t1, &t2, &forest(&[&["a", "b", "c", "d", "e", "f"]])).unwrap());
    assert!(is_agreement_forest(&t1, &t1, &forest(&[&["a", "b", "c", "d", "e", "f"]])).unwrap());
    let bad = forest(&[&["a", "b"], &["c", "d", "e"]]);
    assert!(is_agreement_forest(&t1, &t2, &bad).is_err());

    let limits = Limits::default();
    let f = maf_exact(&t1, &t2, &limits).unwrap();
    assert_eq!(f.len(), 2);
    assert!(is_agreement_forest(&t1, &t2, &f).unwrap());
    assert_eq!(maf_exact(&t1, &t1, &limits).unwrap().len(), 1);
    assert_eq!(tbr_bfs_oracle(&t1, &t2, &limits).unwrap(), 1);
    assert_eq!(tbr_bfs_oracle(&t1, &t1, &limits).unwrap(), 0);

    let sol = uhn_solve(&t1, &t2, &limits).unwrap();
    assert_eq!(sol.value, 1);
    assert_eq!(sol.network.reticulation_number(), 1);
    sol.network.validate().unwrap();
    assert!(sol.images[0].verifies_unrooted(&sol.network, &t1));
    assert!(sol.images[1].verifies_unrooted(&sol.network, &t2));
    for tree in [&t1, &t2] {
        assert!(utc_oracle(&sol.network, tree, &limits).unwrap().is_some());
    }
    let back = forest_from_network(&sol.network, &sol.images[0], &sol.images[1]).unwrap();
    assert!(back.len() <= 2);
    assert!(is_agreement_forest(&t1, &t2, &back).unwrap());
}

#[test]
fn quartets() {
    let limits = Limits::default();
    let (q1, q2) = (t("(a,b,(c,d));"), t("(a,c,(b,d));"));
    assert_eq!(maf_exact(&q1, &q2, &limits).unwrap().len(), 2);
    assert_eq!(tbr_bfs_oracle(&q1, &q2, &limits).unwrap(), 1);
    let f = maf_exact(&q1, &q2, &limits).unwrap();
    let (n, i1, i2) = network_from_forest(&q1, &q2, &f).unwrap();
    assert_eq!(n.reticulation_number(), 1);
    assert!(i1.verifies_unrooted(&n, &q1) && i2.verifies_unrooted(&n, &q2));
}

#[test]
fn identical_trees_give_the_tree() {
    let limits = Limits::default();
    let tree = unrooted_caterpillar(&["a", "b", "c", "d", "e"]);
    let sol = uhn_solve(&tree, &tree, &limits).unwrap();
    assert_eq!(sol.value, 0);
    assert!(phylonet::labelled_isomorphic(&sol.network, &tree).unwrap());
    let back = forest_from_network(&sol.network, &sol.images[0], &sol.images[1]).unwrap();
    assert_eq!(back.len(), 1);
}

#[test]
fn forest_text_round_trip() {
    let f = forest(&[&["d", "e", "f"], &["a", "c", "b"]]);
    let text = f.to_string();
    assert_eq!(text, "a,b,c\nd,e,f\n");
    assert_eq!(text.parse::<AgreementForest>().unwrap(), f);
}

#[test]
fn guards() {
    let limits = Limits::default();
    let big = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f", "g", "h"]);
    assert!(matches!(tbr_bfs_oracle(&big, &big, &limits), Err(phylonet::Error::Guard { .. })));
    let taxa = taxon_names(11);
    let names: Vec<&str> = taxa.iter().map(String::as_str).collect();
    let huge = unrooted_caterpillar(&names);
    assert!(matches!(maf_exact(&huge, &huge, &limits), Err(phylonet::Error::Guard { .. })));
    assert_eq!(maf_within(&huge, &huge, 1).unwrap().unwrap().len(), 1);
}

#[test]
fn random_pairs_agree_across_methods() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..120 {
        let n = rng.gen_range(3..=7);
        let taxa = taxon_names(n);
        let (t1, t2) = (unrooted_tree(&taxa, &mut rng), unrooted_tree(&taxa, &mut rng));
        let f = maf_exact(&t1, &t2, &limits).unwrap();
        assert!(is_agreement_forest(&t1, &t2, &f).unwrap(), "pair {i}");
        let tbr = tbr_bfs_oracle(&t1, &t2, &limits).unwrap();
        assert_eq!(f.len() - 1, tbr, "pair {i}");
        if n <= 6 {
            assert_eq!(f.len(), brute_maf(&t1, &t2), "pair {i}");
        }
        let (net, i1, i2) = network_from_forest(&t1, &t2, &f).unwrap();
        net.validate().unwrap();
        assert_eq!(net.reticulation_number(), f.len() - 1);
        assert!(i1.verifies_unrooted(&net, &t1) && i2.verifies_unrooted(&net, &t2), "pair {i}");
        if net.edge_count() <= limits.oracle_edges {
            assert!(utc_oracle(&net, &t2, &limits).unwrap().is_some());
        }
        let back = forest_from_network(&net, &i1, &i2).unwrap();
        assert!(back.len() <= f.len());
        assert!(is_agreement_forest(&t1, &t2, &back).unwrap(), "pair {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Any agreement forest, not only a maximum one, wires into a network of
    /// matching reticulation number.
    #[test]
    fn every_forest_wires(seed in any::<u64>(), n in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taxa = taxon_names(n);
        let (t1, t2) = (unrooted_tree(&taxa, &mut rng), unrooted_tree(&taxa, &mut rng));
        let forests: Vec<AgreementForest> = partitions(&taxa)
            .into_iter()
            .map(AgreementForest::new)
            .filter(|f| is_agreement_forest(&t1, &t2, f).unwrap())
            .collect();
        let f = &forests[rng.gen_range(0..forests.len())];
        let (net, i1, i2) = network_from_forest(&t1, &t2, f).unwrap();
        prop_assert_eq!(net.reticulation_number(), f.len() - 1);
        prop_assert!(i1.verifies_unrooted(&net, &t1));
        prop_assert!(i2.verifies_unrooted(&net, &t2));
    }
}
