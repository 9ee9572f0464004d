#![allow(dead_code)]

use std::collections::BTreeSet;

use phylonet::newick::{parse_rooted_network, parse_unrooted_network, parse_unrooted_tree};
use phylonet::{RootedNetwork, Taxon, UnrootedNetwork, UnrootedTree};

pub const SIX_T1: &str = "((a,b),c,(d,(e,f)));";
pub const SIX_T2: &str = "((c,b),a,(f,(e,d)));";
pub const SIX_NR: &str = "(((a,(b,#H1)),(c)#H1),((f)#H2,(d,(e,#H2))));";

/// Cycle with one pendant taxon per cycle node, in the given circular order.
pub fn cycle_network(order: &[&str]) -> UnrootedNetwork {
    let mut s = String::from("unrooted-network\n");
    let k = order.len();
    for (i, x) in order.iter().enumerate() {
        s.push_str(&format!("p{} p{}\n", i, (i + 1) % k));
        s.push_str(&format!("p{i} l{i}\nleaf l{i} {x}\n"));
    }
    parse_unrooted_network(&s).unwrap()
}

pub fn six_cycle() -> UnrootedNetwork {
    cycle_network(&["a", "b", "c", "d", "e", "f"])
}

pub fn six_rooted_network() -> RootedNetwork {
    parse_rooted_network(SIX_NR).unwrap()
}

pub fn t(s: &str) -> UnrootedTree {
    parse_unrooted_tree(s).unwrap()
}

pub fn names(xs: &[&str]) -> Vec<Taxon> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Nontrivial splits computed by brute force over all taxon subsets and
/// path checks, independent of the library's canonical forms.
pub fn brute_splits(t: &UnrootedTree) -> BTreeSet<BTreeSet<Taxon>> {
    let taxa = t.taxa();
    let n = taxa.len();
    let mut out = BTreeSet::new();
    for (_, a, b) in t.edges() {
        // taxa reachable from a without using edge a-b
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(u) = stack.pop() {
            for w in t.neighbors(u).collect::<Vec<_>>() {
                if (u == a && w == b) || (u == b && w == a) {
                    continue;
                }
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        let side: BTreeSet<Taxon> = seen.iter().filter_map(|&v| t.label(v).map(String::from)).collect();
        let side = if side.contains(&taxa[0]) {
            taxa.iter().filter(|x| !side.contains(*x)).cloned().collect()
        } else {
            side
        };
        if side.len() >= 2 && n - side.len() >= 2 {
            out.insert(side);
        }
    }
    out
}
