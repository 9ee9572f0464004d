//! Tree-level operations: canonical forms, isomorphism, restriction,
//! rooting and caterpillar constructors.

use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeId, NodeId, RootedNetwork, RootedTree, Taxon, UnrootedNetwork, UnrootedTree};
use crate::error::{Error, Result};

/// Canonical Newick string of a subtree hanging below `v`, entered from `from`.
/// Children are ordered by their smallest taxon. Returns `(text, min_taxon)`.
fn canon_below(t: &UnrootedTree, v: NodeId, from: Option<NodeId>) -> (String, String) {
    if let Some(l) = t.label(v) {
        return (l.to_string(), l.to_string());
    }
    let mut parts: Vec<(String, String)> = Vec::new();
    let mut skipped = false;
    for w in t.neighbors(v) {
        if Some(w) == from && !skipped {
            skipped = true;
            continue;
        }
        parts.push(canon_below(t, w, Some(v)));
    }
    parts.sort_by(|a, b| a.1.cmp(&b.1));
    let min = parts.first().map(|p| p.1.clone()).unwrap_or_default();
    let body: Vec<&str> = parts.iter().map(|p| p.0.as_str()).collect();
    (format!("({})", body.join(",")), min)
}

/// Canonical Newick of an unrooted tree: the tree is hung from the neighbour
/// of its smallest taxon and children are sorted by smallest taxon.
pub fn canonical_unrooted(t: &UnrootedTree) -> String {
    let Some((first, &leaf)) = t.taxon_index().iter().next() else {
        return ";".into();
    };
    if t.degree(leaf) == 0 {
        return format!("{first};");
    }
    let p = t.neighbors(leaf).next().unwrap();
    if t.label(p).is_some() {
        let (a, b) = (first.as_str(), t.label(p).unwrap());
        return format!("({a},{b});");
    }
    format!("{};", canon_below(t, p, None).0)
}

fn canon_rooted_below(t: &RootedTree, v: NodeId) -> (String, String) {
    if let Some(l) = t.label(v) {
        return (l.to_string(), l.to_string());
    }
    let mut parts: Vec<(String, String)> = t.children(v).map(|c| canon_rooted_below(t, c)).collect();
    parts.sort_by(|a, b| a.1.cmp(&b.1));
    let min = parts.first().map(|p| p.1.clone()).unwrap_or_default();
    let body: Vec<&str> = parts.iter().map(|p| p.0.as_str()).collect();
    (format!("({})", body.join(",")), min)
}

/// Canonical Newick of a rooted tree.
pub fn canonical_rooted(t: &RootedTree) -> String {
    match t.root() {
        Some(r) => format!("{};", canon_rooted_below(t, r).0),
        None => ";".into(),
    }
}

fn same_taxa(a: &[Taxon], b: &[Taxon]) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::TaxonMismatch)
    }
}

/// Leaf-label preserving isomorphism of two unrooted trees.
pub fn labelled_isomorphic(a: &UnrootedTree, b: &UnrootedTree) -> Result<bool> {
    same_taxa(&a.taxa(), &b.taxa())?;
    Ok(canonical_unrooted(a) == canonical_unrooted(b))
}

/// Leaf-label preserving isomorphism of two rooted trees.
pub fn rooted_isomorphic(a: &RootedTree, b: &RootedTree) -> Result<bool> {
    same_taxa(&a.taxa(), &b.taxa())?;
    Ok(canonical_rooted(a) == canonical_rooted(b))
}

/// `T|S`: the minimal subtree spanning `S` with degree-2 nodes suppressed.
pub fn restrict_to_taxa(t: &UnrootedTree, keep: &[Taxon]) -> Result<UnrootedTree> {
    if keep.is_empty() {
        return Err(Error::Invalid("restriction to an empty taxon set".into()));
    }
    for x in keep {
        if t.leaf(x).is_none() {
            return Err(Error::UnknownTaxon(x.clone()));
        }
    }
    let keep: BTreeSet<&str> = keep.iter().map(String::as_str).collect();
    let mut r = t.clone();
    for (x, v) in t.taxon_index() {
        if !keep.contains(x.as_str()) {
            r.set_label(*v, None);
        }
    }
    r.tidy();
    Ok(r.compact())
}

/// Rooted analogue of restriction, used on trees and on switched networks.
pub fn restrict_rooted(t: &RootedTree, keep: &[Taxon]) -> Result<RootedTree> {
    for x in keep {
        if t.leaf(x).is_none() {
            return Err(Error::UnknownTaxon(x.clone()));
        }
    }
    let keep: BTreeSet<&str> = keep.iter().map(String::as_str).collect();
    let mut r = t.clone();
    for (x, v) in t.taxon_index() {
        if !keep.contains(x.as_str()) {
            r.set_label(*v, None);
        }
    }
    r.tidy();
    Ok(r.compact())
}

/// Subdivides `e` with a new root and directs all edges away from it.
pub fn root_at_edge(t: &UnrootedTree, e: EdgeId) -> Result<RootedTree> {
    if !t.is_edge(e) {
        return Err(Error::Invalid(format!("edge {e} is not in the tree")));
    }
    let (a, b) = t.endpoints(e);
    let mut out = RootedNetwork::new();
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for v in t.nodes() {
        let w = out.add_node();
        if let Some(l) = t.label(v) {
            out.set_label(w, Some(l.to_string()));
        }
        map.insert(v, w);
    }
    let root = out.add_node();
    let mut stack = vec![(a, b), (b, a)];
    out.add_edge(root, map[&a]);
    out.add_edge(root, map[&b]);
    while let Some((v, from)) = stack.pop() {
        for &f in t.incident(v) {
            if f == e {
                continue;
            }
            let w = t.other_end(f, v);
            if w == from {
                continue;
            }
            out.add_edge(map[&v], map[&w]);
            stack.push((w, v));
        }
    }
    Ok(out)
}

/// Forgets edge directions and suppresses the root.
pub fn unroot(t: &RootedTree) -> UnrootedTree {
    let mut out = UnrootedNetwork::new();
    let mut map = BTreeMap::new();
    for v in t.nodes() {
        let w = out.add_node();
        if let Some(l) = t.label(v) {
            out.set_label(w, Some(l.to_string()));
        }
        map.insert(v, w);
    }
    for (_, u, v) in t.edges() {
        out.add_edge(map[&u], map[&v]);
    }
    out.tidy();
    out.compact()
}

/// Taxa on the far side of `e` when leaving node `from`.
pub fn side_taxa(t: &UnrootedNetwork, e: EdgeId, from: NodeId) -> BTreeSet<Taxon> {
    let start = t.other_end(e, from);
    t.side_of(start, e)
        .into_iter()
        .filter_map(|v| t.label(v).map(str::to_string))
        .collect()
}

/// Taxon bipartition induced by a tree edge, normalised to the side that
/// excludes the smallest taxon.
pub fn edge_split(t: &UnrootedTree, e: EdgeId) -> BTreeSet<Taxon> {
    let (a, _) = t.endpoints(e);
    let side = side_taxa(t, e, a);
    let min = t.taxa().into_iter().next();
    match min {
        Some(m) if side.contains(&m) => {
            let all: BTreeSet<Taxon> = t.taxa().into_iter().collect();
            all.difference(&side).cloned().collect()
        }
        _ => side,
    }
}

/// All nontrivial splits (both sides at least two taxa), normalised.
pub fn splits(t: &UnrootedTree) -> BTreeSet<BTreeSet<Taxon>> {
    let n = t.taxon_count();
    t.edge_ids()
        .into_iter()
        .map(|e| edge_split(t, e))
        .filter(|s| s.len() >= 2 && n - s.len() >= 2)
        .collect()
}

/// The edge whose split separates `side` from the rest, if any.
pub fn edge_for_split(t: &UnrootedTree, side: &BTreeSet<Taxon>) -> Option<EdgeId> {
    let all: BTreeSet<Taxon> = t.taxa().into_iter().collect();
    let other: BTreeSet<Taxon> = all.difference(side).cloned().collect();
    t.edge_ids().into_iter().find(|&e| {
        let s = edge_split(t, e);
        &s == side || s == other
    })
}

/// Clusters (taxa below each node) of a rooted tree.
pub fn clusters(t: &RootedTree) -> BTreeSet<BTreeSet<Taxon>> {
    let mut out = BTreeSet::new();
    if let Some(r) = t.root() {
        collect_clusters(t, r, &mut out);
    }
    out
}

fn collect_clusters(t: &RootedTree, v: NodeId, out: &mut BTreeSet<BTreeSet<Taxon>>) -> BTreeSet<Taxon> {
    let mut c = BTreeSet::new();
    if let Some(l) = t.label(v) {
        c.insert(l.to_string());
    }
    for w in t.children(v).collect::<Vec<_>>() {
        c.extend(collect_clusters(t, w, out));
    }
    out.insert(c.clone());
    c
}

/// One side of the root split of a rooted tree (the cluster of the root's
/// child that does not contain the smallest taxon).
pub fn root_split(t: &RootedTree) -> BTreeSet<Taxon> {
    let r = t.root().expect("rooted tree has a root");
    let kids: Vec<NodeId> = t.children(r).collect();
    let mut dummy = BTreeSet::new();
    let side = collect_clusters(t, kids[0], &mut dummy);
    let min = t.taxa().into_iter().next().unwrap();
    if side.contains(&min) {
        collect_clusters(t, kids[1], &mut dummy)
    } else {
        side
    }
}

/// Unrooted caterpillar `(x1, ..., xn)`: a path of parents with cherries at
/// both ends. Two taxa give a single edge and three a star.
pub fn unrooted_caterpillar(order: &[&str]) -> UnrootedTree {
    let mut t = UnrootedNetwork::new();
    match order.len() {
        0 => {}
        1 => {
            t.add_leaf(order[0]);
        }
        2 => {
            let a = t.add_leaf(order[0]);
            let b = t.add_leaf(order[1]);
            t.add_edge(a, b);
        }
        n => {
            let spine: Vec<NodeId> = (0..n - 2).map(|_| t.add_node()).collect();
            for w in spine.windows(2) {
                t.add_edge(w[0], w[1]);
            }
            for (i, x) in order.iter().enumerate() {
                let leaf = t.add_leaf(x);
                let p = spine[i.saturating_sub(1).min(n - 3)];
                t.add_edge(p, leaf);
            }
        }
    }
    t
}

/// Rooted caterpillar: the unrooted one rooted on the edge entering `x1`.
pub fn rooted_caterpillar(order: &[&str]) -> RootedTree {
    let mut t = RootedNetwork::new();
    if order.len() == 1 {
        t.add_leaf(order[0]);
        return t;
    }
    let mut parent = t.add_node();
    for (i, x) in order.iter().enumerate() {
        let leaf = t.add_leaf(x);
        t.add_edge(parent, leaf);
        if i + 2 < order.len() {
            let next = t.add_node();
            t.add_edge(parent, next);
            parent = next;
        }
    }
    t
}

/// Pairs of taxa sharing a neighbour, lexicographically sorted.
pub fn cherries(t: &UnrootedTree) -> Vec<(Taxon, Taxon)> {
    let mut by_parent: BTreeMap<NodeId, Vec<Taxon>> = BTreeMap::new();
    for (x, &v) in t.taxon_index() {
        if t.degree(v) == 1 {
            let p = t.neighbors(v).next().unwrap();
            by_parent.entry(p).or_default().push(x.clone());
        }
    }
    let mut out = Vec::new();
    for (_, mut xs) in by_parent {
        xs.sort();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                out.push((xs[i].clone(), xs[j].clone()));
            }
        }
    }
    out.sort();
    out
}
