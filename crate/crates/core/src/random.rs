//! Seeded random instances for tests, benchmarks and the self-test.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{EdgeId, RootedNetwork, RootedTree, Taxon, UnrootedNetwork, UnrootedTree};

/// Taxon names `a`, `b`, ... (then `t26`, `t27`, ...).
pub fn taxon_names(n: usize) -> Vec<Taxon> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("t{i}")
            }
        })
        .collect()
}

/// Uniform random unrooted binary tree by random leaf insertion.
pub fn unrooted_tree<R: Rng>(taxa: &[Taxon], rng: &mut R) -> UnrootedTree {
    let mut order = taxa.to_vec();
    order.shuffle(rng);
    let mut t = UnrootedNetwork::new();
    match order.len() {
        0 => return t,
        1 => {
            t.add_leaf(&order[0]);
            return t;
        }
        _ => {}
    }
    let a = t.add_leaf(&order[0]);
    let b = t.add_leaf(&order[1]);
    t.add_edge(a, b);
    for x in &order[2..] {
        let edges = t.edge_ids();
        let e = edges[rng.gen_range(0..edges.len())];
        let w = t.subdivide(e);
        let l = t.add_leaf(x);
        t.add_edge(w, l);
    }
    t.compact()
}

/// Random rooted binary tree by random leaf insertion (including above the root).
pub fn rooted_tree<R: Rng>(taxa: &[Taxon], rng: &mut R) -> RootedTree {
    let mut order = taxa.to_vec();
    order.shuffle(rng);
    let mut t = RootedNetwork::new();
    if order.is_empty() {
        return t;
    }
    t.add_leaf(&order[0]);
    for x in &order[1..] {
        let edges: Vec<EdgeId> = t.edges().map(|(e, _, _)| e).collect();
        let pick = rng.gen_range(0..=edges.len());
        let old_root = t.root().unwrap();
        let l = t.add_leaf(x);
        if pick == edges.len() {
            let r = t.add_node();
            t.add_edge(r, old_root);
            t.add_edge(r, l);
        } else {
            let w = t.subdivide(edges[pick]);
            t.add_edge(w, l);
        }
    }
    t.compact()
}

/// Random unrooted network: a random tree plus `r` extra edges, each joining
/// the subdivision points of two distinct random edges.
pub fn unrooted_network<R: Rng>(taxa: &[Taxon], r: usize, rng: &mut R) -> UnrootedNetwork {
    let mut n = unrooted_tree(taxa, rng);
    if n.edge_count() == 0 {
        return n;
    }
    for _ in 0..r {
        let edges = n.edge_ids();
        let e1 = edges[rng.gen_range(0..edges.len())];
        let u = n.subdivide(e1);
        let edges = n.edge_ids();
        let adjacent: Vec<EdgeId> = n.incident(u).to_vec();
        let candidates: Vec<EdgeId> = edges.into_iter().filter(|e| !adjacent.contains(e)).collect();
        let e2 = candidates[rng.gen_range(0..candidates.len())];
        let v = n.subdivide(e2);
        n.add_edge(u, v);
    }
    n.compact()
}

/// Random rooted network: a random rooted tree plus `r` reticulation edges,
/// each from a subdivision point to a later subdivision point that is not
/// its ancestor.
pub fn rooted_network<R: Rng>(taxa: &[Taxon], r: usize, rng: &mut R) -> RootedNetwork {
    let mut n = rooted_tree(taxa, rng);
    let mut added = 0;
    let mut attempts = 0;
    while added < r && attempts < 1000 {
        attempts += 1;
        let edges: Vec<EdgeId> = n.edges().map(|(e, _, _)| e).collect();
        if edges.len() < 2 {
            break;
        }
        let e1 = edges[rng.gen_range(0..edges.len())];
        let e2 = edges[rng.gen_range(0..edges.len())];
        if e1 == e2 {
            continue;
        }
        let mut trial = n.clone();
        let u = trial.subdivide(e1);
        let v = trial.subdivide(e2);
        trial.add_edge(u, v);
        if trial.topological_order().is_some() && trial.validate().is_ok() {
            n = trial;
            added += 1;
        }
    }
    n.compact()
}

/// A tree displayed by `n`: random non-bridge edges are deleted until no
/// cycle remains, then the result is tidied.
pub fn displayed_tree<R: Rng>(n: &UnrootedNetwork, rng: &mut R) -> UnrootedTree {
    let mut g = n.clone();
    while g.reticulation_number() > 0 {
        let bridges = g.bridges();
        let cands: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !bridges.contains(e)).collect();
        let e = cands[rng.gen_range(0..cands.len())];
        g.remove_edge(e);
        g.tidy();
    }
    g.compact()
}
