mod common;

use common::*;
use phylonet::newick::write_tree;
use phylonet::random::{rooted_tree, taxon_names, unrooted_network, unrooted_tree};
use phylonet::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reticulation_numbers() {
    let nu = six_cycle();
    assert_eq!(nu.node_count(), 12);
    assert_eq!(nu.edge_count(), 12);
    assert_eq!(nu.reticulation_number(), 1);
    assert_eq!(six_rooted_network().reticulation_number(), 2);
    assert_eq!(six_rooted_network().reticulations().len(), 2);
    assert_eq!(t(SIX_T1).reticulation_number(), 0);
}

#[test]
fn restriction_examples() {
    let cat = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f"]);
    let r = restrict_to_taxa(&cat, &names(&["a", "b", "c"])).unwrap();
    assert_eq!(r.node_count(), 4);
    assert_eq!(r.edge_count(), 3);
    assert_eq!(r.taxa(), names(&["a", "b", "c"]));

    let same = restrict_to_taxa(&cat, &cat.taxa()).unwrap();
    assert!(labelled_isomorphic(&same, &cat).unwrap());

    let q = restrict_to_taxa(&cat, &names(&["a", "b", "e", "f"])).unwrap();
    let expected: std::collections::BTreeSet<_> = [names(&["e", "f"]).into_iter().collect()].into();
    assert_eq!(brute_splits(&q), expected);

    let single = restrict_to_taxa(&cat, &names(&["d"])).unwrap();
    assert_eq!((single.node_count(), single.edge_count()), (1, 0));

    assert!(matches!(
        restrict_to_taxa(&cat, &names(&["z"])),
        Err(Error::UnknownTaxon(_))
    ));
}

#[test]
fn tidy_examples() {
    let mut path = UnrootedNetwork::new();
    let u = path.add_leaf("u");
    let v = path.add_node();
    let w = path.add_leaf("w");
    path.add_edge(u, v);
    path.add_edge(v, w);
    path.tidy();
    assert_eq!((path.node_count(), path.edge_count()), (2, 1));

    let mut valid = t(SIX_T1);
    let before = write_tree(&valid);
    valid.tidy();
    assert_eq!(write_tree(&valid), before);

    // star with an unlabelled cherry hanging off one arm
    let mut g = t("(a,b,c);");
    let x = g.leaf("c").unwrap();
    g.set_label(x, None);
    let y = g.add_node();
    let z1 = g.add_node();
    let z2 = g.add_node();
    g.add_edge(x, y);
    g.add_edge(y, z1);
    g.add_edge(y, z2);
    g.tidy();
    assert_eq!(g.taxa(), names(&["a", "b"]));
    assert_eq!((g.node_count(), g.edge_count()), (2, 1));
}

#[test]
fn isomorphism_examples() {
    let a = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f"]);
    let b = unrooted_caterpillar(&["f", "e", "d", "c", "b", "a"]);
    assert!(labelled_isomorphic(&a, &b).unwrap());
    assert!(!labelled_isomorphic(&t(SIX_T1), &t(SIX_T2)).unwrap());
    assert!(labelled_isomorphic(&a, &a).unwrap());
    assert!(labelled_isomorphic(&a, &t(SIX_T1)).unwrap());
    assert_eq!(
        labelled_isomorphic(&a, &t("(a,b,c);")),
        Err(Error::TaxonMismatch)
    );
}

#[test]
fn rooting_examples() {
    let star = t("(x,y,z);");
    let z = star.leaf("z").unwrap();
    let e = star.incident(z)[0];
    let r = root_at_edge(&star, e).unwrap();
    assert_eq!(canonical_rooted(&r), "((x,y),z);");
    assert!(labelled_isomorphic(&unroot(&r), &star).unwrap());

    let t1 = t(SIX_T1);
    let a = t1.leaf("a").unwrap();
    let r1 = root_at_edge(&t1, t1.incident(a)[0]).unwrap();
    let cat = rooted_caterpillar(&["a", "b", "c", "d", "e", "f"]);
    assert!(rooted_isomorphic(&r1, &cat).unwrap());
    r1.validate().unwrap();

    let cat_u = unroot(&cat);
    assert!(labelled_isomorphic(&cat_u, &t1).unwrap());
    assert!(root_at_edge(&t1, 999).is_err());
}

#[test]
fn bridges_of_a_network() {
    let nu = six_cycle();
    // six leaf edges are bridges, cycle edges are not
    assert_eq!(nu.bridges().len(), 6);
    let tree = t(SIX_T1);
    assert_eq!(tree.bridges().len(), tree.edge_count());
}

#[test]
fn reserved_prefix_rejected() {
    assert!(check_user_taxa(&names(&["a", "__x0"])).is_err());
    assert!(check_user_taxa(&names(&["a", "b_c.d-e"])).is_ok());
}

fn arb_tree(max: usize) -> impl Strategy<Value = UnrootedTree> {
    (3..=max, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        unrooted_tree(&taxon_names(n), &mut rng)
    })
}

proptest! {
    #[test]
    fn isomorphism_matches_split_oracle(n in 4usize..9, s1 in any::<u64>(), s2 in any::<u64>()) {
        let taxa = taxon_names(n);
        let a = unrooted_tree(&taxa, &mut ChaCha8Rng::seed_from_u64(s1));
        let b = unrooted_tree(&taxa, &mut ChaCha8Rng::seed_from_u64(s2));
        prop_assert_eq!(labelled_isomorphic(&a, &b).unwrap(), brute_splits(&a) == brute_splits(&b));
    }

    #[test]
    fn isomorphism_is_an_equivalence(n in 4usize..6, seeds in proptest::array::uniform3(any::<u64>())) {
        let taxa = taxon_names(n);
        let ts: Vec<_> = seeds.iter().map(|&s| unrooted_tree(&taxa, &mut ChaCha8Rng::seed_from_u64(s))).collect();
        let iso = |i: usize, j: usize| labelled_isomorphic(&ts[i], &ts[j]).unwrap();
        prop_assert!(iso(0, 0));
        prop_assert_eq!(iso(0, 1), iso(1, 0));
        if iso(0, 1) && iso(1, 2) {
            prop_assert!(iso(0, 2));
        }
    }

    #[test]
    fn rooting_round_trip(tree in arb_tree(12)) {
        for e in tree.edge_ids() {
            let r = root_at_edge(&tree, e).unwrap();
            prop_assert!(r.validate().is_ok());
            prop_assert!(labelled_isomorphic(&unroot(&r), &tree).unwrap());
        }
    }

    #[test]
    fn restriction_has_requested_taxa(tree in arb_tree(12), mask in any::<u16>()) {
        let keep: Vec<Taxon> = tree.taxa().into_iter().enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| x).collect();
        prop_assume!(!keep.is_empty());
        let r = restrict_to_taxa(&tree, &keep).unwrap();
        prop_assert_eq!(r.taxa(), keep.clone());
        if keep.len() >= 2 {
            prop_assert!(r.validate().is_ok());
        }
        let expected: std::collections::BTreeSet<_> = brute_splits(&tree).into_iter()
            .map(|s| s.into_iter().filter(|x| keep.contains(x)).collect::<std::collections::BTreeSet<_>>())
            .filter(|s| s.len() >= 2 && keep.len() - s.len() >= 2)
            .map(|s| if s.contains(&keep[0]) { keep.iter().filter(|x| !s.contains(*x)).cloned().collect() } else { s })
            .collect();
        prop_assert_eq!(brute_splits(&r), expected);
    }

    #[test]
    fn tidy_is_idempotent_and_keeps_taxa(n in 3usize..9, r in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = unrooted_network(&taxon_names(n), r, &mut rng);
        prop_assert!(net.validate().is_ok());
        prop_assert_eq!(net.reticulation_number(), r);
        let taxa = net.taxa();
        let edges: Vec<_> = net.edge_ids();
        net.remove_edge(edges[seed as usize % edges.len()]);
        net.tidy();
        let once = phylonet::newick::write_network(&net);
        net.tidy();
        prop_assert_eq!(phylonet::newick::write_network(&net), once);
        prop_assert_eq!(net.taxa(), taxa);
    }

    #[test]
    fn random_rooted_trees_are_valid(n in 1usize..10, seed in any::<u64>()) {
        let t = rooted_tree(&taxon_names(n), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(t.taxa().len(), n);
    }
}
