//! Tree containment: rooted check by switching enumeration, unrooted check by
//! bounded branching on cherries, and a brute-force spanning-tree oracle.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{guard, Error, Result};
use crate::model::{
    canonical_rooted, canonical_unrooted, cherries, EdgeId, Image, NodeId, RootedNetwork,
    RootedTree, TidyEvent, UnrootedNetwork, UnrootedTree,
};
use crate::reduce::kernelize_utc;
use crate::Limits;

fn check_taxa(a: Vec<String>, b: Vec<String>) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::TaxonMismatch)
    }
}

/// Tries every choice of one incoming edge per reticulation. Returns the image
/// (the switched tree) of the first choice that tidies to `t`.
pub fn rooted_tc(n: &RootedNetwork, t: &RootedTree) -> Result<Option<Image>> {
    check_taxa(n.taxa(), t.taxa())?;
    let target = canonical_rooted(t);
    let rets = n.reticulations();
    if rets.len() >= usize::BITS as usize {
        return Err(Error::Invalid("too many reticulations".into()));
    }
    for mask in 0..(1usize << rets.len()) {
        let (edges, mut g) = switching(n, &rets, mask);
        g.tidy();
        if canonical_rooted(&g) == target {
            return Ok(Some(Image::from_rooted(n, edges)));
        }
    }
    Ok(None)
}

/// The switched graph keeping incoming edge `mask` bit `i` of reticulation
/// `i`, and the kept host edges.
pub(crate) fn switching(
    n: &RootedNetwork,
    rets: &[NodeId],
    mask: usize,
) -> (BTreeSet<EdgeId>, RootedNetwork) {
    let mut dropped = BTreeSet::new();
    for (i, &r) in rets.iter().enumerate() {
        let ins = n.in_edges(r);
        let keep = (mask >> i) & 1;
        for (j, &e) in ins.iter().enumerate() {
            if j != keep {
                dropped.insert(e);
            }
        }
    }
    let mut g = n.clone();
    for &e in &dropped {
        g.remove_edge(e);
    }
    let kept = n.edges().map(|(e, _, _)| e).filter(|e| !dropped.contains(e)).collect();
    (kept, g)
}

/// Literal display check: every spanning tree of `n` is enumerated, pruned
/// to the subtree spanning the taxa, tidied and compared with `t`. Every
/// subtree containing the taxa extends to a spanning tree, so this covers all
/// candidate images.
pub fn utc_oracle(n: &UnrootedNetwork, t: &UnrootedTree, limits: &Limits) -> Result<Option<Image>> {
    check_taxa(n.taxa(), t.taxa())?;
    guard("network edges", n.edge_count(), limits.oracle_edges)?;
    let target = canonical_unrooted(t);
    let ids = n.edge_ids();
    if !spans(n, &ids) {
        return Ok(None);
    }
    let mut seen = BTreeSet::new();
    let mut found = None;
    spanning_trees(n, &ids, n.reticulation_number(), &mut |kept| {
        let pruned = prune_to_taxa(n, kept);
        if !seen.insert(pruned.clone()) {
            return false;
        }
        let img = Image::from_unrooted(n, pruned);
        let mut g = img.subgraph_unrooted(n);
        g.tidy();
        if canonical_unrooted(&g) == target {
            found = Some(img);
            return true;
        }
        false
    });
    Ok(found)
}

/// Calls `visit` on the edge set of each spanning tree of the connected
/// graph `n` (deleting `extra` of `ids`) until it returns true.
fn spanning_trees(n: &UnrootedNetwork, ids: &[EdgeId], extra: usize, visit: &mut dyn FnMut(&[EdgeId]) -> bool) -> bool {
    fn go(
        n: &UnrootedNetwork,
        ids: &[EdgeId],
        i: usize,
        left: usize,
        kept: &mut Vec<EdgeId>,
        visit: &mut dyn FnMut(&[EdgeId]) -> bool,
    ) -> bool {
        if left == 0 {
            let len = kept.len();
            kept.extend_from_slice(&ids[i..]);
            let stop = visit(kept);
            kept.truncate(len);
            return stop;
        }
        if ids.len() - i < left {
            return false;
        }
        let rest: Vec<EdgeId> = kept.iter().chain(&ids[i + 1..]).copied().collect();
        if spans(n, &rest) && go(n, ids, i + 1, left - 1, kept, visit) {
            return true;
        }
        if ids.len() - i > left {
            kept.push(ids[i]);
            let stop = go(n, ids, i + 1, left, kept, visit);
            kept.pop();
            return stop;
        }
        false
    }
    go(n, ids, 0, extra, &mut Vec::new(), visit)
}

fn spans(n: &UnrootedNetwork, kept: &[EdgeId]) -> bool {
    let nodes: Vec<NodeId> = n.nodes().collect();
    let pos: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = nodes.len();
    for &e in kept {
        let (u, v) = n.endpoints(e);
        let (a, b) = (find(&mut parent, pos[&u]), find(&mut parent, pos[&v]));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

/// Removes unlabelled leaves of the forest spanned by `kept` until none remain.
pub(crate) fn prune_to_taxa(n: &UnrootedNetwork, kept: &[EdgeId]) -> BTreeSet<EdgeId> {
    let mut live: BTreeSet<EdgeId> = kept.iter().copied().collect();
    let mut deg: BTreeMap<NodeId, Vec<EdgeId>> = BTreeMap::new();
    for &e in &live {
        let (u, v) = n.endpoints(e);
        deg.entry(u).or_default().push(e);
        deg.entry(v).or_default().push(e);
    }
    let mut stack: Vec<NodeId> = deg
        .iter()
        .filter(|(v, es)| es.len() == 1 && n.label(**v).is_none())
        .map(|(v, _)| *v)
        .collect();
    while let Some(v) = stack.pop() {
        let Some(&e) = deg[&v].iter().find(|e| live.contains(e)) else { continue };
        if deg[&v].iter().filter(|e| live.contains(e)).count() != 1 {
            continue;
        }
        live.remove(&e);
        let w = n.other_end(e, v);
        if n.label(w).is_none() && deg[&w].iter().filter(|e| live.contains(e)).count() == 1 {
            stack.push(w);
        }
    }
    live
}

/// Decides whether `n` displays `t` by bounded branching, optionally after
/// kernelization. Each branch lowers the reticulation number by at least one.
pub fn utc_solve(n: &UnrootedNetwork, t: &UnrootedTree, use_kernel: bool) -> Result<bool> {
    check_taxa(n.taxa(), t.taxa())?;
    if use_kernel {
        let (kernel, _log) = kernelize_utc(n, t)?;
        if let Some(v) = kernel.decided {
            return Ok(v);
        }
        return Ok(Branching::new(&kernel.network).run(kernel.tree, 0).is_some());
    }
    Ok(utc_certificate(n, t)?.is_some())
}

/// Branching without kernelization, returning an image in the original network.
pub fn utc_certificate(n: &UnrootedNetwork, t: &UnrootedTree) -> Result<Option<Image>> {
    check_taxa(n.taxa(), t.taxa())?;
    let b = Branching::new(n);
    Ok(b.run(t.clone(), 0).map(|edges| Image::from_unrooted(n, edges)))
}

/// Working copy of the host with, for every current edge, the set of original
/// edges it stands for.
#[derive(Clone)]
struct Branching {
    net: UnrootedNetwork,
    origin: BTreeMap<EdgeId, Vec<EdgeId>>,
    /// original leaf edges of taxa removed by cherry reduction
    extra: Vec<EdgeId>,
}

const PAR_DEPTH: usize = 2;

impl Branching {
    fn new(n: &UnrootedNetwork) -> Self {
        let mut b = Branching {
            net: n.clone(),
            origin: n.edge_ids().into_iter().map(|e| (e, vec![e])).collect(),
            extra: Vec::new(),
        };
        b.tidy();
        b
    }

    fn tidy(&mut self) {
        let origin = &mut self.origin;
        self.net.tidy_tracked(&mut |ev| match ev {
            TidyEvent::Removed(e) => {
                origin.remove(&e);
            }
            TidyEvent::Merged { from, into } => {
                let mut o = origin.remove(&from[0]).unwrap_or_default();
                o.extend(origin.remove(&from[1]).unwrap_or_default());
                origin.insert(into, o);
            }
        });
    }

    fn delete_edge(&mut self, e: EdgeId) {
        self.net.remove_edge(e);
        self.origin.remove(&e);
    }

    /// Drops taxon-free components; false if the taxa are no longer connected.
    fn keep_taxon_component(&mut self) -> bool {
        let comps = self.net.components();
        let mut with_taxa = 0;
        for c in comps {
            if c.iter().any(|&v| self.net.label(v).is_some()) {
                with_taxa += 1;
            } else {
                for v in c {
                    for e in self.net.incident(v).to_vec() {
                        if self.net.is_edge(e) {
                            self.delete_edge(e);
                        }
                    }
                    self.net.remove_node(v);
                }
            }
        }
        with_taxa <= 1
    }

    fn image(&self, edges: impl IntoIterator<Item = EdgeId>) -> BTreeSet<EdgeId> {
        let mut out: BTreeSet<EdgeId> = self.extra.iter().copied().collect();
        for e in edges {
            out.extend(self.origin[&e].iter().copied());
        }
        out
    }

    fn run(mut self, mut t: UnrootedTree, depth: usize) -> Option<BTreeSet<EdgeId>> {
        loop {
            if t.taxon_count() <= 3 {
                // any subtree spanning at most three taxa tidies to the unique tree
                let span = spanning_edges(&self.net);
                let pruned = prune_to_taxa(&self.net, &span);
                return Some(self.image(pruned));
            }
            if self.net.is_tree() {
                return (canonical_unrooted(&self.net) == canonical_unrooted(&t))
                    .then(|| self.image(self.net.edge_ids()));
            }
            let (x, y) = cherries(&t).into_iter().next().expect("tree with 4+ taxa has a cherry");
            let px = self.net.parent_of_leaf(&x).expect("taxa are leaves");
            let py = self.net.parent_of_leaf(&y).expect("taxa are leaves");
            if px == py {
                let ly = self.net.leaf(&y).unwrap();
                let e = self.net.incident(ly)[0];
                self.extra.extend(self.origin[&e].iter().copied());
                self.delete_edge(e);
                self.net.remove_node(ly);
                self.tidy();
                t.delete_taxon(&y);
                continue;
            }
            let k = self.net.reticulation_number();
            let mut choices: Vec<EdgeId> = Vec::new();
            for (leaf, p) in [(&x, px), (&y, py)] {
                let lv = self.net.leaf(leaf).unwrap();
                for &e in self.net.incident(p) {
                    if self.net.other_end(e, p) != lv && !choices.contains(&e) {
                        choices.push(e);
                    }
                }
            }
            let branch = |e: EdgeId| {
                let mut b = self.clone();
                b.delete_edge(e);
                if !b.keep_taxon_component() {
                    return None;
                }
                b.tidy();
                assert!(b.net.reticulation_number() < k, "branching must lower the reticulation number");
                b.run(t.clone(), depth + 1)
            };
            return if depth < PAR_DEPTH {
                choices.par_iter().find_map_first(|&e| branch(e))
            } else {
                choices.iter().find_map(|&e| branch(e))
            };
        }
    }
}

/// Edges of a BFS spanning tree of a connected graph.
fn spanning_edges(n: &UnrootedNetwork) -> Vec<EdgeId> {
    let Some(s) = n.nodes().next() else { return Vec::new() };
    let mut seen = BTreeSet::from([s]);
    let mut queue = std::collections::VecDeque::from([s]);
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &e in n.incident(u) {
            let w = n.other_end(e, u);
            if seen.insert(w) {
                out.push(e);
                queue.push_back(w);
            }
        }
    }
    out
}
