mod common;

use common::*;
use phylonet::random::{displayed_tree, taxon_names, unrooted_network, unrooted_tree};
use phylonet::reduce::*;
use phylonet::utc::{utc_oracle, utc_solve};
use phylonet::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cycle_instance() -> (UnrootedNetwork, UnrootedTree) {
    (six_cycle(), unrooted_caterpillar(&["a", "b", "c", "f", "e", "d"]))
}

fn oracle(n: &UnrootedNetwork, t: &UnrootedTree) -> bool {
    utc_oracle(n, t, &Limits::default()).unwrap().is_some()
}

#[test]
fn common_pendant_subtree_examples() {
    let a = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f"]);
    let b = unrooted_caterpillar(&["a", "b", "c", "f", "e", "d"]);
    let p = find_common_pendant_subtree(&[a.clone(), b.clone()]).unwrap().unwrap();
    assert_eq!(p.taxa, names(&["a", "b", "c"]));
    assert_eq!(canonical_rooted(&p.shape), "((a,b),c);");
    let (out, step) = apply_cps(&[a.clone(), b], &p, "__x0");
    for tr in &out {
        assert_eq!(tr.taxa(), names(&["__x0", "d", "e", "f"]));
        tr.validate().unwrap();
    }
    assert_eq!(step.to_string(), "cps __x0 a,b,c ((a,b),c);");

    assert!(find_common_pendant_subtree(&[t(SIX_T1), t(SIX_T2)]).unwrap().is_none());

    let p = find_common_pendant_subtree(&[a.clone(), a.clone()]).unwrap().unwrap();
    assert!(p.whole);
    let (out, _) = apply_cps(&[a.clone(), a], &p, "__x0");
    assert!(out.iter().all(|t| t.taxa() == names(&["__x0"]) && t.node_count() == 1));
}

#[test]
fn pendant_subtree_shape_respects_attachment() {
    // same taxa {a,b,c} pendant in both, but attached at different points
    let a = t("(((a,b),c),d,(e,f));");
    let b = t("(((b,c),a),d,(e,f));");
    let p = find_common_pendant_subtree(&[a, b]).unwrap().unwrap();
    assert_ne!(p.taxa, names(&["a", "b", "c"]));
}

#[test]
fn two_chain_truncation_is_unsafe_on_the_cycle() {
    let (n, tree) = cycle_instance();
    assert!(!utc_solve(&n, &tree, false).unwrap());
    let chains = maximal_common_chains(&[n.clone(), tree.clone()]).unwrap();
    assert!(chains.contains(&names(&["a", "b", "c"])));
    assert!(chains.contains(&names(&["d", "e", "f"])));
    // d = 3 leaves both chains alone
    assert!(matches!(apply_dcc(&[n.clone(), tree.clone()], 3), Err(Error::NoChain(3))));
    let pair = [n, tree];
    let (s1, st1) = apply_dcc_on(&pair, &names(&["a", "b", "c"]), 2).unwrap();
    assert_eq!(st1.to_string(), "cc 2 a,b,c");
    assert!(oracle(&s1[0], &s1[1]));
    let (s2, _) = apply_dcc_on(&s1, &names(&["d", "e", "f"]), 2).unwrap();
    assert!(utc_solve(&s2[0], &s2[1], false).unwrap());
    assert!(oracle(&s2[0], &s2[1]));
    // the driver picks chains itself and agrees on the first one
    let (_, st) = apply_dcc(&pair, 2).unwrap();
    assert_eq!(st, st1);
    let (k, _) = kernelize_utc(&cycle_instance().0, &cycle_instance().1).unwrap();
    assert_eq!(k.decided, Some(false));
}

#[test]
fn chain_truncation_keeps_prefix() {
    let x = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f", "g", "h", "i"]);
    let y = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f", "h", "g", "i"]);
    let s = [x, y];
    let chain = find_common_chain(&s, 5).unwrap().unwrap();
    assert_eq!(chain.taxa, names(&["a", "b", "c", "d", "e", "f"]));
    let (out, step) = apply_dcc(&s, 5).unwrap();
    assert_eq!(step.to_string(), "cc 5 a,b,c,d,e,f");
    assert_eq!(out[0].taxa(), names(&["a", "b", "c", "d", "e", "g", "h", "i"]));
    assert!(out.iter().all(|t| t.taxa() == out[0].taxa() && t.validate().is_ok()));
}

#[test]
fn network_chain_cases() {
    let (n, tree) = cycle_instance();
    let chain = names(&["a", "b", "c"]);
    match apply_nc_on(&n, &tree, &chain).unwrap() {
        NcOutcome::Applied(n2, t2, step) => {
            assert_eq!(step.to_string(), "nc 5 a,b,c delete-edge e1");
            assert_eq!(oracle(&n2, &t2), oracle(&n, &tree));
        }
        _ => panic!("rule should apply"),
    }

    // length-6 chain, tree with pendant chains on the two halves
    let whole = names(&["a", "b", "c", "d", "e", "f"]);
    for (tree, expect) in [(tree.clone(), false), (unrooted_caterpillar(&["c", "b", "a", "f", "e", "d"]), true)] {
        match apply_nc_on(&n, &tree, &whole).unwrap() {
            NcOutcome::Applied(n2, t2, step) => {
                assert_eq!(step.to_string(), "nc 2 a,b,c,d,e,f delete-edge e34");
                assert_eq!(oracle(&n2, &t2), expect);
                assert_eq!(oracle(&n, &tree), expect);
            }
            _ => panic!("rule should apply"),
        }
    }

    let seven = cycle_network(&["a", "b", "c", "d", "e", "f", "g"]);
    let tree7 = unrooted_caterpillar(&["a", "b", "c", "d", "e", "f", "g"]);
    let chain7 = names(&["a", "b", "c", "d", "e", "f", "g"]);
    assert!(matches!(apply_nc_on(&seven, &tree7, &chain7).unwrap(), NcOutcome::No(_)));
}

#[test]
fn kernel_trivial_cases() {
    let tree = t(SIX_T1);
    let (k, log) = kernelize_utc(&tree, &tree).unwrap();
    assert_eq!(k.decided, Some(true));
    assert_eq!(log.steps.last().unwrap().to_string(), "trivial YES");
    let (k, _) = kernelize_utc(&six_cycle(), &t(SIX_T1)).unwrap();
    assert_eq!(k.decided, Some(true));
}

fn random_instance(rng: &mut ChaCha8Rng, max_taxa: usize, yes_bias: bool) -> (UnrootedNetwork, UnrootedTree) {
    let r = rng.gen_range(1..=3);
    let n_taxa = rng.gen_range(4..=max_taxa.min((27 - 3 * r) / 2));
    let taxa = taxon_names(n_taxa);
    let net = unrooted_network(&taxa, r, rng);
    let tree = if yes_bias { displayed_tree(&net, rng) } else { unrooted_tree(&taxa, rng) };
    (net, tree)
}

#[test]
fn kernel_bounds_and_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..200 {
        let (net, tree) = random_instance(&mut rng, 10, i % 2 == 0);
        let (k, log) = kernelize_utc(&net, &tree).unwrap();
        let r = k.network.reticulation_number();
        assert!(r <= net.reticulation_number());
        if k.decided.is_none() {
            assert!(k.tree.taxon_count() <= (6 * r).max(4), "instance {i}");
            assert!(k.network.edge_count() <= (15 * r).max(5), "instance {i}");
        }
        let kernel_answer = k.decided.unwrap_or_else(|| oracle(&k.network, &k.tree));
        assert_eq!(kernel_answer, oracle(&net, &tree), "instance {i}: {log}");

        // the log replays to the same kernel
        let text = log.to_string();
        let parsed: ReductionLog = text.parse().unwrap();
        assert_eq!(parsed.to_string(), text);
        let (rep, verdict) = parsed.replay(&[net.clone(), tree.clone()]).unwrap();
        assert_eq!(verdict, k.decided);
        if verdict.is_none() {
            assert_eq!(canonical_unrooted(&rep[1]), canonical_unrooted(&k.tree));
            assert_eq!(rep[0].edge_count(), k.network.edge_count());
        }
        // each step shrinks the instance
        let size = |s: &[UnrootedNetwork]| s.iter().map(|n| n.node_count() + n.edge_count() + n.taxon_count()).sum::<usize>();
        let mut prev = size(&[net.clone(), tree.clone()]);
        for j in 1..=log.steps.len() {
            let prefix = ReductionLog { steps: log.steps[..j].to_vec() };
            let (cur, v) = prefix.replay(&[net.clone(), tree.clone()]).unwrap();
            if v.is_some() {
                break;
            }
            let now = size(&cur);
            assert!(now < prev, "instance {i} step {j}");
            prev = now;
        }
    }
}

#[test]
fn ruhn_kernel_examples() {
    let tree = t(SIX_T1);
    for k in 0..3 {
        let (kern, _) = kernelize_ruhn(&[tree.clone(), tree.clone()], k).unwrap();
        assert_eq!(kern.decided, Some(true));
        assert_eq!(kern.trees[0].taxon_count(), 1);
    }
    let pair = [t(SIX_T1), t(SIX_T2)];
    let (kern, log) = kernelize_ruhn(&pair, 2).unwrap();
    assert!(log.steps.is_empty());
    assert_eq!(kern.decided, None);
    assert!(pair.iter().zip(&kern.trees).all(|(a, b)| canonical_unrooted(a) == canonical_unrooted(b)));
    let (kern, _) = kernelize_ruhn(&pair, 0).unwrap();
    assert_eq!(kern.decided, Some(false));
}

#[test]
fn log_text_round_trip() {
    let text = "prune 3\ncps __x0 a,b,c ((a,b),c);\ncc 3 d,e,f,g\nnc 8 a,b,c delete-taxon c\nnc 0 a,b,c no\ntrivial NO\n";
    let log: ReductionLog = text.parse().unwrap();
    assert_eq!(log.to_string(), text);
    assert!("bogus 1".parse::<ReductionLog>().is_err());
}
