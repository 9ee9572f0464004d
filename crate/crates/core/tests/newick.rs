mod common;

use common::*;
use phylonet::newick::*;
use phylonet::random::{rooted_network, rooted_tree, taxon_names, unrooted_network, unrooted_tree};
use phylonet::utc::utc_oracle;
use phylonet::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn parses_six_taxon_trees() {
    let t1 = parse_unrooted_tree(SIX_T1).unwrap();
    assert!(labelled_isomorphic(&t1, &unrooted_caterpillar(&["a", "b", "c", "d", "e", "f"])).unwrap());
    let t2 = parse_unrooted_tree(SIX_T2).unwrap();
    assert_eq!(t2.taxon_count(), 6);
    t2.validate().unwrap();
    assert!(!labelled_isomorphic(&t1, &t2).unwrap());
}

#[test]
fn rejects_malformed_trees() {
    assert!(matches!(parse_unrooted_tree("(a,(b,c)));"), Err(Error::Parse { .. })));
    assert!(parse_unrooted_tree("((a,b),c,(d,(e,a)));").is_err());
    assert!(parse_unrooted_tree("((a,b),(c,d));").is_err());
    assert!(parse_rooted_tree("(a,b,c);").is_err());
    assert!(parse_unrooted_tree("((a:1,b),c,d);").is_err());
    assert!(parse_unrooted_tree("((a,b),c,d)").is_err());
    assert!(parse_unrooted_tree("((a,b,e),c,d);").is_err());
}

#[test]
fn writes_canonical_text() {
    let a = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f"]);
    let b = unrooted_caterpillar(&["f", "e", "d", "c", "b", "a"]);
    assert_eq!(write_tree(&a), write_tree(&b));
    assert_eq!(write_tree(&parse_unrooted_tree("(b,a);").unwrap()), "(a,b);");
    for s in [SIX_T1, SIX_T2, "(a,b,c);"] {
        let x = parse_unrooted_tree(s).unwrap();
        let y = parse_unrooted_tree(&write_tree(&x)).unwrap();
        assert!(labelled_isomorphic(&x, &y).unwrap());
    }
}

#[test]
fn documents_with_names_and_comments() {
    let doc = NewickDocument::parse("T1 = ((a,b),c,(d,(e,f))); [second]\nT2=((c,b),a,(f,(e,d)));\n").unwrap();
    assert_eq!(doc.entries.len(), 2);
    assert_eq!(doc.entries[0].name.as_deref(), Some("T1"));
    let trees = doc.trees(Mode::Unrooted).unwrap();
    assert_eq!(trees.len(), 2);
    assert!(NewickDocument::parse("(a,b,c); (a,b").is_err());
}

#[test]
fn parses_six_taxon_networks() {
    let nu = six_cycle();
    nu.validate().unwrap();
    assert_eq!(nu.reticulation_number(), 1);
    let text = write_network(&nu);
    let back = parse_unrooted_network(&text).unwrap();
    assert_eq!(write_network(&back), text);

    let nr = parse_rooted_network(SIX_NR).unwrap();
    nr.validate().unwrap();
    assert_eq!(nr.reticulation_number(), 2);
    let again = parse_rooted_network(&write_rooted_network(&nr)).unwrap();
    assert_eq!(write_rooted_network(&again), write_rooted_network(&nr));
    assert!(matches!(parse_network(SIX_NR, Mode::Rooted), Ok(ParsedNetwork::Rooted(_))));
}

#[test]
fn rejects_bad_networks() {
    let degree4 = "unrooted-network\nc x1\nc x2\nc x3\nc x4\nleaf x1 a\nleaf x2 b\nleaf x3 c\nleaf x4 d\n";
    assert!(parse_unrooted_network(degree4).is_err());
    let disconnected = "unrooted-network\nu v\nleaf u a\nleaf v b\nw z\nleaf w c\nleaf z d\n";
    assert!(parse_unrooted_network(disconnected).is_err());
    assert!(parse_rooted_network("((a,#H1),(b,c));").is_err());
    assert!(parse_rooted_network("((a)#H1,(b,#H1)#H1);").is_err());
}

#[test]
fn dot_export() {
    let star = parse_unrooted_tree("(x,y,z);").unwrap();
    let dot = export_dot(&star, None);
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.lines().filter(|l| l.contains('[') && !l.contains("--")).count(), 4);
    assert_eq!(dot.lines().filter(|l| l.contains("--")).count(), 3);

    let nu = six_cycle();
    let img = utc_oracle(&nu, &t(SIX_T1), &Limits::default()).unwrap().unwrap();
    let dot = export_dot(&nu, Some(&img));
    assert_eq!(dot.matches("color=red").count(), img.host_edges.len());
    assert_eq!(img.host_edges.len(), 11);

    let dot = export_dot_rooted(&six_rooted_network(), None);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), six_rooted_network().edge_count());
}

fn mutations(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' {
            let mut m = s.to_string();
            m.remove(i);
            out.push(m);
        }
    }
    out
}

proptest! {
    #[test]
    fn tree_round_trip(n in 2usize..64, seed in any::<u64>()) {
        let tree = unrooted_tree(&taxon_names(n), &mut ChaCha8Rng::seed_from_u64(seed));
        let text = write_tree(&tree);
        let back = parse_unrooted_tree(&text).unwrap();
        prop_assert!(labelled_isomorphic(&tree, &back).unwrap());
        prop_assert_eq!(write_tree(&back), text);
    }

    #[test]
    fn rooted_tree_round_trip(n in 2usize..64, seed in any::<u64>()) {
        let tree = rooted_tree(&taxon_names(n), &mut ChaCha8Rng::seed_from_u64(seed));
        let back = parse_rooted_tree(&write_rooted_tree(&tree)).unwrap();
        prop_assert!(rooted_isomorphic(&tree, &back).unwrap());
    }

    #[test]
    fn network_round_trip(n in 3usize..40, r in 0usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = unrooted_network(&taxon_names(n), r, &mut rng);
        let text = write_network(&net);
        prop_assert_eq!(write_network(&parse_unrooted_network(&text).unwrap()), text);
        let rn = rooted_network(&taxon_names(n), r, &mut rng);
        let text = write_rooted_network(&rn);
        let back = parse_rooted_network(&text).unwrap();
        prop_assert_eq!(back.reticulation_number(), rn.reticulation_number());
        prop_assert_eq!(write_rooted_network(&back), text);
    }

    #[test]
    fn bracket_and_duplicate_mutations_rejected(n in 3usize..20, seed in any::<u64>(), pick in any::<usize>()) {
        let tree = unrooted_tree(&taxon_names(n), &mut ChaCha8Rng::seed_from_u64(seed));
        let text = write_tree(&tree);
        for m in mutations(&text) {
            prop_assert!(parse_unrooted_tree(&m).is_err(), "{}", m);
        }
        let taxa = tree.taxa();
        let (a, b) = (&taxa[pick % n], &taxa[(pick / n + 1 + pick % n) % n]);
        prop_assume!(a != b);
        let dup = text.replacen(&b.to_string(), "\u{0}", 1).replace('\u{0}', a);
        prop_assert!(parse_unrooted_tree(&dup).is_err());
    }
}
