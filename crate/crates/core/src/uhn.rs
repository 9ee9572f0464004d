//! Unrooted hybridization number of two trees through agreement forests:
//! validity check, exact maximum agreement forest, a breadth-first TBR
//! oracle, and the constructions turning forests into networks and back.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{guard, Error, Result};
use crate::model::{
    canonical_unrooted, edge_for_split, labelled_isomorphic, restrict_to_taxa, side_taxa, EdgeId,
    Image, NodeId, Taxon, UnrootedNetwork, UnrootedTree,
};
use crate::Limits;

/// A partition of the taxa into blocks, kept sorted by smallest taxon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementForest {
    pub blocks: Vec<BTreeSet<Taxon>>,
}

impl AgreementForest {
    pub fn new(mut blocks: Vec<BTreeSet<Taxon>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        AgreementForest { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

impl fmt::Display for AgreementForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let v: Vec<&str> = b.iter().map(String::as_str).collect();
            writeln!(f, "{}", v.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for AgreementForest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let b: BTreeSet<Taxon> = line.split(',').map(|x| x.trim().to_string()).collect();
            if b.iter().any(String::is_empty) {
                return Err(Error::Invalid(format!("empty taxon in block {line:?}")));
            }
            blocks.push(b);
        }
        Ok(AgreementForest::new(blocks))
    }
}

/// Nodes of the smallest subtree of `t` connecting `taxa`.
pub fn spanning_nodes(t: &UnrootedTree, taxa: &BTreeSet<Taxon>) -> BTreeSet<NodeId> {
    let mut live: BTreeSet<NodeId> = t.nodes().collect();
    let mut deg: BTreeMap<NodeId, usize> = live.iter().map(|&v| (v, t.degree(v))).collect();
    let keep = |v: NodeId| t.label(v).is_some_and(|l| taxa.contains(l));
    let mut stack: Vec<NodeId> = live.iter().copied().filter(|&v| deg[&v] <= 1 && !keep(v)).collect();
    while let Some(v) = stack.pop() {
        if !live.remove(&v) {
            continue;
        }
        for w in t.neighbors(v) {
            if live.contains(&w) {
                let d = deg.get_mut(&w).unwrap();
                *d -= 1;
                if *d <= 1 && !keep(w) {
                    stack.push(w);
                }
            }
        }
    }
    live
}

fn check_partition(taxa: &[Taxon], f: &AgreementForest) -> Result<()> {
    let mut seen = BTreeSet::new();
    for b in &f.blocks {
        for x in b {
            if !seen.insert(x.clone()) {
                return Err(Error::Invalid(format!("taxon {x} appears in two blocks")));
            }
        }
    }
    if seen.into_iter().collect::<Vec<_>>() != taxa {
        return Err(Error::Invalid("blocks do not partition the taxa".into()));
    }
    Ok(())
}

/// Whether `f` is an agreement forest of `t1` and `t2`: blocks induce
/// node-disjoint subtrees in both trees and identical restrictions.
pub fn is_agreement_forest(t1: &UnrootedTree, t2: &UnrootedTree, f: &AgreementForest) -> Result<bool> {
    if t1.taxa() != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    check_partition(&t1.taxa(), f)?;
    for b in &f.blocks {
        if b.len() > 3 {
            let keep: Vec<Taxon> = b.iter().cloned().collect();
            if !labelled_isomorphic(&restrict_to_taxa(t1, &keep)?, &restrict_to_taxa(t2, &keep)?)? {
                return Ok(false);
            }
        }
    }
    for t in [t1, t2] {
        let spans: Vec<BTreeSet<NodeId>> = f.blocks.iter().map(|b| spanning_nodes(t, b)).collect();
        for i in 0..spans.len() {
            for j in i + 1..spans.len() {
                if !spans[i].is_disjoint(&spans[j]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Leaf distances and leaf-to-leaf path node masks of one tree.
struct PathTable {
    dist: Vec<Vec<u32>>,
    path: Vec<Vec<u128>>,
    leaf: Vec<u128>,
}

impl PathTable {
    fn new(t: &UnrootedTree, taxa: &[Taxon]) -> Self {
        let t = t.compact();
        let n = taxa.len();
        let mut dist = vec![vec![0; n]; n];
        let mut path = vec![vec![0u128; n]; n];
        let mut leaf = vec![0u128; n];
        for (i, x) in taxa.iter().enumerate() {
            let s = t.leaf(x).unwrap();
            leaf[i] = 1 << s;
            // BFS parents from s
            let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
            let mut depth: BTreeMap<NodeId, u32> = BTreeMap::from([(s, 0)]);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for w in t.neighbors(u) {
                    if !depth.contains_key(&w) {
                        depth.insert(w, depth[&u] + 1);
                        parent.insert(w, u);
                        queue.push_back(w);
                    }
                }
            }
            for (j, y) in taxa.iter().enumerate() {
                let mut v = t.leaf(y).unwrap();
                dist[i][j] = depth[&v];
                let mut mask = 1u128 << v;
                while v != s {
                    v = parent[&v];
                    mask |= 1 << v;
                }
                path[i][j] = mask;
            }
        }
        PathTable { dist, path, leaf }
    }

    /// 0, 1, 2 for ab|cd, ac|bd, ad|bc.
    fn quartet(&self, a: usize, b: usize, c: usize, d: usize) -> u8 {
        let m = &self.dist;
        let s = [m[a][b] + m[c][d], m[a][c] + m[b][d], m[a][d] + m[b][c]];
        (0..3).min_by_key(|&i| s[i]).unwrap() as u8
    }
}

struct MafSearch {
    n: usize,
    tables: [PathTable; 2],
}

#[derive(Clone)]
struct Block {
    members: Vec<usize>,
    masks: [u128; 2],
}

impl MafSearch {
    fn fits(&self, blocks: &[Block], b: usize, x: usize) -> Option<[u128; 2]> {
        let m = &blocks[b].members;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                for k in j + 1..m.len() {
                    let (p, q, r) = (m[i], m[j], m[k]);
                    if self.tables[0].quartet(p, q, r, x) != self.tables[1].quartet(p, q, r, x) {
                        return None;
                    }
                }
            }
        }
        let mut masks = blocks[b].masks;
        for (t, mask) in masks.iter_mut().enumerate() {
            *mask |= self.tables[t].path[m[0]][x];
            if blocks.iter().enumerate().any(|(o, ob)| o != b && ob.masks[t] & *mask != 0) {
                return None;
            }
        }
        Some(masks)
    }

    fn dfs(&self, x: usize, blocks: &mut Vec<Block>, cap: usize) -> bool {
        if x == self.n {
            return true;
        }
        for b in 0..blocks.len() {
            if let Some(masks) = self.fits(blocks, b, x) {
                let saved = blocks[b].masks;
                blocks[b].members.push(x);
                blocks[b].masks = masks;
                if self.dfs(x + 1, blocks, cap) {
                    return true;
                }
                blocks[b].members.pop();
                blocks[b].masks = saved;
            }
        }
        if blocks.len() < cap {
            let masks = [self.tables[0].leaf[x], self.tables[1].leaf[x]];
            if blocks.iter().all(|b| b.masks[0] & masks[0] == 0 && b.masks[1] & masks[1] == 0) {
                blocks.push(Block { members: vec![x], masks });
                if self.dfs(x + 1, blocks, cap) {
                    return true;
                }
                blocks.pop();
            }
        }
        false
    }
}

/// An agreement forest with at most `max_blocks` blocks, if one exists.
/// Depth-first search over restricted-growth assignments, pruned as soon as
/// a block's quartets disagree or two blocks' subtrees meet.
pub fn maf_within(t1: &UnrootedTree, t2: &UnrootedTree, max_blocks: usize) -> Result<Option<AgreementForest>> {
    let taxa = t1.taxa();
    if taxa != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    guard("taxa for bit-parallel forest search", taxa.len(), 64)?;
    if taxa.is_empty() {
        return Ok(Some(AgreementForest::new(vec![])));
    }
    let search = MafSearch {
        n: taxa.len(),
        tables: [PathTable::new(t1, &taxa), PathTable::new(t2, &taxa)],
    };
    for cap in 1..=max_blocks.min(taxa.len()) {
        let mut blocks = Vec::new();
        if search.dfs(0, &mut blocks, cap) {
            let f = blocks
                .iter()
                .map(|b| b.members.iter().map(|&i| taxa[i].clone()).collect())
                .collect();
            return Ok(Some(AgreementForest::new(f)));
        }
    }
    Ok(None)
}

/// A maximum agreement forest (fewest blocks).
pub fn maf_exact(t1: &UnrootedTree, t2: &UnrootedTree, limits: &Limits) -> Result<AgreementForest> {
    guard("taxa for exact agreement forest", t1.taxon_count(), limits.maf_taxa)?;
    let n = t1.taxon_count();
    Ok(maf_within(t1, t2, n)?.expect("singletons always form an agreement forest"))
}

enum Attach {
    Node(NodeId),
    Edge(EdgeId),
}

/// All trees one TBR move away from `t` (including `t` itself).
pub fn tbr_neighbours(t: &UnrootedTree) -> Vec<UnrootedTree> {
    let mut out = Vec::new();
    for e in t.edge_ids() {
        let mut g = t.clone();
        g.remove_edge(e);
        g.tidy();
        let comps = g.components();
        if comps.len() != 2 {
            continue;
        }
        let points = |comp: &[NodeId]| -> Vec<Attach> {
            if comp.len() == 1 {
                return vec![Attach::Node(comp[0])];
            }
            g.edges()
                .filter(|(_, u, _)| comp.binary_search(u).is_ok())
                .map(|(f, _, _)| Attach::Edge(f))
                .collect()
        };
        let (pa, pb) = (points(&comps[0]), points(&comps[1]));
        for a in &pa {
            for b in &pb {
                let mut h = g.clone();
                let mut at = |p: &Attach| match *p {
                    Attach::Node(v) => v,
                    Attach::Edge(f) => h.subdivide(f),
                };
                let (u, v) = (at(a), at(b));
                h.add_edge(u, v);
                out.push(h.compact());
            }
        }
    }
    out
}

/// Minimum number of TBR moves turning `t1` into `t2`, by breadth-first
/// search over tree space.
pub fn tbr_bfs_oracle(t1: &UnrootedTree, t2: &UnrootedTree, limits: &Limits) -> Result<usize> {
    if t1.taxa() != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    guard("taxa for TBR search", t1.taxon_count(), limits.tbr_taxa)?;
    let target = canonical_unrooted(t2);
    let start = canonical_unrooted(t1);
    if start == target {
        return Ok(0);
    }
    let mut seen: HashMap<String, usize> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([(t1.compact(), 0usize)]);
    while let Some((t, d)) = queue.pop_front() {
        for s in tbr_neighbours(&t) {
            let c = canonical_unrooted(&s);
            if c == target {
                return Ok(d + 1);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(c) {
                e.insert(d + 1);
                queue.push_back((s, d + 1));
            }
        }
    }
    Err(Error::Invalid("target tree unreachable".into()))
}

/// Where a component joins the rest: a taxon, or the edge of the restricted
/// tree separating `side` from the other taxa of the component.
#[derive(Clone, Debug)]
enum WiringPoint {
    Taxon(Taxon),
    Split(BTreeSet<Taxon>),
}

struct Wiring {
    block: usize,
    inner: WiringPoint,
    outer: WiringPoint,
}

fn wiring_point(t: &UnrootedTree, e: EdgeId, at: NodeId) -> WiringPoint {
    if let Some(x) = t.label(at) {
        return WiringPoint::Taxon(x.to_string());
    }
    let f = *t.incident(at).iter().find(|&&f| f != e).unwrap();
    WiringPoint::Split(side_taxa(t, f, at))
}

/// Elimination order: repeatedly detach the pendant component (in the
/// second tree restricted to the remaining taxa) with the smallest taxon.
fn elimination_order(t2: &UnrootedTree, f: &AgreementForest) -> Result<(Vec<Wiring>, usize)> {
    let mut remaining: Vec<usize> = (0..f.len()).collect();
    let mut order = Vec::new();
    while remaining.len() > 1 {
        let all: Vec<Taxon> = remaining.iter().flat_map(|&b| f.blocks[b].iter().cloned()).collect();
        let t = restrict_to_taxa(t2, &all)?;
        let found = remaining.iter().enumerate().find_map(|(pos, &b)| {
            edge_for_split(&t, &f.blocks[b]).map(|e| (pos, b, e))
        });
        let Some((pos, b, e)) = found else {
            return Err(Error::Invalid("no pendant component in the forest".into()));
        };
        let (x, y) = t.endpoints(e);
        let (u, v) = if side_taxa(&t, e, y) == f.blocks[b] { (x, y) } else { (y, x) };
        order.push(Wiring {
            block: b,
            inner: wiring_point(&t, e, u),
            outer: wiring_point(&t, e, v),
        });
        remaining.remove(pos);
    }
    Ok((order, remaining[0]))
}

/// Taxa reachable from `start` inside `img` without using `skip`, and the
/// hop distance to every reached node.
fn walk(n: &UnrootedNetwork, img: &BTreeSet<EdgeId>, start: NodeId, skip: Option<EdgeId>) -> BTreeMap<NodeId, usize> {
    let mut dist = BTreeMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &e in n.incident(u) {
            if Some(e) == skip || !img.contains(&e) {
                continue;
            }
            let w = n.other_end(e, u);
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&u] + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// The host edge to subdivide for a wiring point: for a taxon its leaf edge,
/// for a split the edge of the image path closest to the smallest taxon.
fn wiring_edge(n: &UnrootedNetwork, img: &BTreeSet<EdgeId>, taxa: &BTreeSet<Taxon>, p: &WiringPoint) -> EdgeId {
    match p {
        WiringPoint::Taxon(x) => n.incident(n.leaf(x).unwrap())[0],
        WiringPoint::Split(side) => {
            let anchor = n.leaf(taxa.iter().next().unwrap()).unwrap();
            let from_anchor = walk(n, img, anchor, None);
            img.iter()
                .copied()
                .filter(|&f| {
                    let (u, _) = n.endpoints(f);
                    let reached: BTreeSet<Taxon> = walk(n, img, u, Some(f))
                        .keys()
                        .filter_map(|&v| n.label(v).map(String::from))
                        .filter(|x| taxa.contains(x))
                        .collect();
                    &reached == side || (reached.len() + side.len() == taxa.len() && reached.is_disjoint(side))
                })
                .min_by_key(|&f| {
                    let (u, v) = n.endpoints(f);
                    (from_anchor[&u].min(from_anchor[&v]), f)
                })
                .expect("split edge present on the image")
        }
    }
}

/// Subdivides the wiring edge; keeps the image and wire sets consistent and
/// returns the new node.
fn open_point(
    n: &mut UnrootedNetwork,
    img: &mut BTreeSet<EdgeId>,
    wires: &mut BTreeSet<EdgeId>,
    taxa: &BTreeSet<Taxon>,
    p: &WiringPoint,
) -> NodeId {
    let f = wiring_edge(n, img, taxa, p);
    let s = n.subdivide(f);
    let halves: Vec<EdgeId> = n.incident(s).to_vec();
    if wires.remove(&f) {
        wires.extend(halves.iter().copied());
    }
    if img.remove(&f) {
        img.extend(halves);
    } else if let WiringPoint::Taxon(x) = p {
        let leaf = n.leaf(x).unwrap();
        img.extend(halves.into_iter().filter(|&h| n.other_end(h, s) == leaf));
    }
    s
}

/// Builds a network displaying both trees from an agreement forest with
/// `k + 1` blocks: start from `t1` and wire the components together in
/// reverse elimination order, growing an image of `t2`. Returns the network
/// (reticulation number `k`) and images of `t1` and `t2`.
pub fn network_from_forest(
    t1: &UnrootedTree,
    t2: &UnrootedTree,
    f: &AgreementForest,
) -> Result<(UnrootedNetwork, Image, Image)> {
    if !is_agreement_forest(t1, t2, f)? {
        return Err(Error::Invalid("not an agreement forest".into()));
    }
    let (order, last) = elimination_order(t2, f)?;
    let mut n = t1.compact();
    let mut images: Vec<BTreeSet<EdgeId>> = f
        .blocks
        .iter()
        .map(|b| {
            let nodes = spanning_nodes(&n, b);
            n.edges()
                .filter(|(_, u, v)| nodes.contains(u) && nodes.contains(v))
                .map(|(e, _, _)| e)
                .collect()
        })
        .collect();
    let mut rest_taxa = f.blocks[last].clone();
    let mut rest_img = std::mem::take(&mut images[last]);
    let mut wires = BTreeSet::new();
    for w in order.iter().rev() {
        let taxa = &f.blocks[w.block];
        let mut img = std::mem::take(&mut images[w.block]);
        let a = open_point(&mut n, &mut img, &mut wires, taxa, &w.inner);
        let b = open_point(&mut n, &mut rest_img, &mut wires, &rest_taxa, &w.outer);
        let e = n.add_edge(a, b);
        wires.insert(e);
        rest_img.extend(img);
        rest_img.insert(e);
        rest_taxa.extend(taxa.iter().cloned());
    }
    let img1: BTreeSet<EdgeId> = n.edge_ids().into_iter().filter(|e| !wires.contains(e)).collect();
    let (img1, img2) = (Image::from_unrooted(&n, img1), Image::from_unrooted(&n, rest_img));
    debug_assert!(img1.verifies_unrooted(&n, t1) && img2.verifies_unrooted(&n, t2));
    Ok((n, img1, img2))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

fn is_tree_on_taxa(n: &UnrootedNetwork, edges: &BTreeSet<EdgeId>) -> bool {
    let nodes: BTreeSet<NodeId> = edges.iter().flat_map(|&e| [n.endpoints(e).0, n.endpoints(e).1]).collect();
    let idx: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(nodes.len());
    for &e in edges {
        let (u, v) = n.endpoints(e);
        if !uf.union(idx[&u], idx[&v]) {
            return false;
        }
    }
    let leaves: Vec<NodeId> = n.taxon_index().values().copied().collect();
    if n.taxon_count() == 1 {
        return edges.is_empty();
    }
    let Some(first) = leaves.first().and_then(|v| idx.get(v)) else { return false };
    let root = uf.find(*first);
    leaves.iter().all(|v| idx.get(v).is_some_and(|&i| uf.find(i) == root))
}

/// Agreement forest from a network and images of both trees: extend the
/// first image greedily (ascending edge id) to a spanning tree, cut the
/// second image at the edges outside it, and group taxa by component.
pub fn forest_from_network(n: &UnrootedNetwork, img1: &Image, img2: &Image) -> Result<AgreementForest> {
    for img in [img1, img2] {
        if img.host_edges.iter().any(|&e| !n.is_edge(e)) || !is_tree_on_taxa(n, &img.host_edges) {
            return Err(Error::Invalid("image is not a tree spanning the taxa".into()));
        }
    }
    let nodes: Vec<NodeId> = n.nodes().collect();
    let idx: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(nodes.len());
    let mut spanning = BTreeSet::new();
    for e in img1.host_edges.iter().copied().chain(n.edge_ids()) {
        let (u, v) = n.endpoints(e);
        if uf.union(idx[&u], idx[&v]) {
            spanning.insert(e);
        }
    }
    let mut uf = UnionFind::new(nodes.len());
    for &e in img2.host_edges.intersection(&spanning) {
        let (u, v) = n.endpoints(e);
        uf.union(idx[&u], idx[&v]);
    }
    let mut groups: BTreeMap<usize, BTreeSet<Taxon>> = BTreeMap::new();
    for (x, v) in n.taxon_index() {
        groups.entry(uf.find(idx[v])).or_default().insert(x.clone());
    }
    Ok(AgreementForest::new(groups.into_values().collect()))
}

/// Result of [`uhn_solve`].
#[derive(Clone, Debug)]
pub struct UhnSolution {
    pub value: usize,
    pub forest: AgreementForest,
    pub network: UnrootedNetwork,
    pub images: [Image; 2],
}

/// Unrooted hybridization number of two trees with a certificate network.
pub fn uhn_solve(t1: &UnrootedTree, t2: &UnrootedTree, limits: &Limits) -> Result<UhnSolution> {
    let forest = maf_exact(t1, t2, limits)?;
    let (network, i1, i2) = network_from_forest(t1, t2, &forest)?;
    Ok(UhnSolution {
        value: forest.len() - 1,
        forest,
        network,
        images: [i1, i2],
    })
}
