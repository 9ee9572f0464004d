//! Exact rooted hybridization number by searching over generators with
//! taxa attached to their sides, and an exhaustive unrooted-network oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{guard, Error, Result};
use crate::model::{
    canonical_rooted, clusters, labelled_isomorphic, restrict_rooted, unroot, EdgeId, Image, NodeId,
    RootedNetwork, RootedTree, Taxon, UnrootedNetwork, UnrootedTree, RESERVED_PREFIX,
};
use crate::uhn::maf_within;
use crate::utc::{rooted_tc, utc_oracle};
use crate::Limits;

/// Backbone of a rooted network: a DAG multigraph whose root has outdegree
/// 1, with `reticulations` nodes of indegree 2 and outdegree at most 1 and
/// all other nodes of indegree 1 and outdegree 2. Taxa go on its sides:
/// every edge, and every reticulation without children.
///
/// The 0-reticulation generator is degenerate: a single edge into a sink
/// that acts as a node side.
#[derive(Clone, Debug)]
pub struct Generator {
    pub graph: RootedNetwork,
    pub reticulations: usize,
    pub edge_sides: Vec<EdgeId>,
    pub node_sides: Vec<NodeId>,
    /// Pairs of edge sides (by index) that are parallel edges.
    parallel: Vec<(usize, usize)>,
    canon: String,
}

impl Generator {
    fn from_graph(g: &RootedNetwork, reticulations: usize) -> Generator {
        let (canon, order) = canonical_generator(g);
        let mut graph = RootedNetwork::new();
        for _ in 0..order.len() {
            graph.add_node();
        }
        let pos: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges: Vec<(usize, usize)> = g.edges().map(|(_, u, v)| (pos[&u], pos[&v])).collect();
        edges.sort_unstable();
        let edge_sides = edges.iter().map(|&(u, v)| graph.add_edge(u, v)).collect();
        let node_sides = graph.nodes().filter(|&v| graph.outdegree(v) == 0).collect();
        let parallel = (1..edges.len()).filter(|&i| edges[i] == edges[i - 1]).map(|i| (i - 1, i)).collect();
        Generator { graph, reticulations, edge_sides, node_sides, parallel, canon }
    }

    /// Canonical text of the generator's shape.
    pub fn canonical(&self) -> &str {
        &self.canon
    }

    pub fn side_count(&self) -> usize {
        self.edge_sides.len() + self.node_sides.len()
    }
}

/// Minimum over all child orderings of the preorder edge list; also returns
/// the node order realizing it.
fn canonical_generator(g: &RootedNetwork) -> (String, Vec<NodeId>) {
    let root = g.root().expect("generator has one root");
    let branching: Vec<NodeId> = g.nodes().filter(|&v| g.outdegree(v) == 2).collect();
    let mut best: Option<(String, Vec<NodeId>)> = None;
    for flips in 0u64..(1 << branching.len()) {
        let mut num: HashMap<NodeId, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if num.contains_key(&v) {
                continue;
            }
            num.insert(v, order.len());
            order.push(v);
            let mut kids: Vec<NodeId> = g.children(v).collect();
            if let Ok(i) = branching.binary_search(&v) {
                if flips >> i & 1 == 1 {
                    kids.reverse();
                }
            }
            stack.extend(kids.into_iter().rev());
        }
        let mut edges: Vec<(usize, usize)> = g.edges().map(|(_, u, v)| (num[&u], num[&v])).collect();
        edges.sort_unstable();
        let text = edges.iter().map(|(u, v)| format!("{u}>{v}")).collect::<Vec<_>>().join(" ");
        if best.as_ref().is_none_or(|(b, _)| text < *b) {
            best = Some((text, order));
        }
    }
    best.unwrap()
}

#[derive(Clone, Copy)]
enum Point {
    Edge(EdgeId),
    Node(NodeId),
}

fn points(g: &Generator) -> Vec<Point> {
    g.edge_sides
        .iter()
        .map(|&e| Point::Edge(e))
        .chain(g.node_sides.iter().map(|&v| Point::Node(v)))
        .collect()
}

fn open(g: &mut RootedNetwork, p: Point) -> NodeId {
    match p {
        Point::Edge(e) => g.subdivide(e),
        Point::Node(v) => v,
    }
}

/// Every generator with one more reticulation obtained from `g`: a new
/// childless reticulation hung below two points, or below one point through
/// a new node with two parallel edges.
fn extensions(g: &Generator) -> Vec<RootedNetwork> {
    let pts = points(g);
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let mut h = g.graph.clone();
            let (a, b) = match (pts[i], pts[j]) {
                (Point::Node(_), _) if i == j => continue,
                (Point::Edge(e), _) if i == j => {
                    let a = h.subdivide(e);
                    let below = h.out_edges(a).iter().copied().find(|&f| h.endpoints(f).1 != a).unwrap();
                    (a, h.subdivide(below))
                }
                (p, q) => {
                    let a = open(&mut h, p);
                    (a, open(&mut h, q))
                }
            };
            let r = h.add_node();
            h.add_edge(a, r);
            h.add_edge(b, r);
            out.push(h);
        }
        let mut h = g.graph.clone();
        let a = open(&mut h, pts[i]);
        let p = h.add_node();
        let r = h.add_node();
        h.add_edge(a, p);
        h.add_edge(p, r);
        h.add_edge(p, r);
        out.push(h);
    }
    out
}

fn build_generators(r: usize, below: Option<&[Generator]>) -> Vec<Generator> {
    let mut g = RootedNetwork::new();
    let root = g.add_node();
    let sink = g.add_node();
    match r {
        0 => {
            g.add_edge(root, sink);
            vec![Generator::from_graph(&g, 0)]
        }
        1 => {
            let ret = g.add_node();
            g.add_edge(root, sink);
            g.add_edge(sink, ret);
            g.add_edge(sink, ret);
            vec![Generator::from_graph(&g, 1)]
        }
        _ => {
            let mut seen: BTreeMap<String, Generator> = BTreeMap::new();
            for prev in below.unwrap() {
                for h in extensions(prev) {
                    let gen = Generator::from_graph(&h, r);
                    seen.entry(gen.canon.clone()).or_insert(gen);
                }
            }
            seen.into_values().collect()
        }
    }
}

fn generators(r: usize) -> Arc<Vec<Generator>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<Vec<Generator>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut levels = cache.lock().unwrap();
    while levels.len() <= r {
        let next = build_generators(levels.len(), levels.last().map(|l| l.as_slice()));
        levels.push(Arc::new(next));
    }
    levels[r].clone()
}

/// All generators with `r` reticulations up to isomorphism, in canonical order.
pub fn enumerate_generators(r: usize, limits: &Limits) -> Result<Vec<Generator>> {
    guard("generator reticulations", r, limits.hn_k)?;
    Ok(generators(r).as_ref().clone())
}

/// Taxa placed on a generator's sides, as indices into a taxon list: an
/// ordered sequence (top to bottom) per edge side, at most one per node side.
#[derive(Clone, Debug)]
struct Labelling {
    edge: Vec<Vec<usize>>,
    node: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    Edge(usize, usize),
    Node(usize),
}

impl Labelling {
    fn new(g: &Generator) -> Self {
        Labelling { edge: vec![Vec::new(); g.edge_sides.len()], node: vec![None; g.node_sides.len()] }
    }

    fn choices(&self) -> Vec<Choice> {
        let mut out = Vec::new();
        for (s, seq) in self.edge.iter().enumerate() {
            out.extend((0..=seq.len()).map(|p| Choice::Edge(s, p)));
        }
        out.extend((0..self.node.len()).filter(|&s| self.node[s].is_none()).map(Choice::Node));
        out
    }

    fn apply(&mut self, c: Choice, x: usize) {
        match c {
            Choice::Edge(s, p) => self.edge[s].insert(p, x),
            Choice::Node(s) => self.node[s] = Some(x),
        }
    }

    fn undo(&mut self, c: Choice) {
        match c {
            Choice::Edge(s, p) => {
                self.edge[s].remove(p);
            }
            Choice::Node(s) => self.node[s] = None,
        }
    }

    fn empty_node_sides(&self) -> usize {
        self.node.iter().filter(|x| x.is_none()).count()
    }

    /// The generator with labels attached; generator node ids are kept.
    fn materialize(&self, g: &Generator, taxa: &[Taxon]) -> RootedNetwork {
        self.materialize_tracked(g, taxa).0
    }

    /// Also returns, per edge side, the edge of the network entering the
    /// side's head.
    fn materialize_tracked(&self, g: &Generator, taxa: &[Taxon]) -> (RootedNetwork, Vec<EdgeId>) {
        let mut n = g.graph.clone();
        let mut entering = g.edge_sides.clone();
        for (s, &e) in g.edge_sides.iter().enumerate() {
            if self.edge[s].is_empty() {
                continue;
            }
            let (u, v) = n.endpoints(e);
            n.remove_edge(e);
            let mut prev = u;
            for &x in &self.edge[s] {
                let w = n.add_node();
                n.add_edge(prev, w);
                let l = n.add_leaf(&taxa[x]);
                n.add_edge(w, l);
                prev = w;
            }
            entering[s] = n.add_edge(prev, v);
        }
        for (s, &v) in g.node_sides.iter().enumerate() {
            if let Some(x) = self.node[s] {
                let l = n.add_leaf(&taxa[x]);
                n.add_edge(v, l);
            }
        }
        (n, entering)
    }
}

fn finish(mut n: RootedNetwork) -> Option<RootedNetwork> {
    n.tidy();
    let n = n.compact();
    n.validate().ok().map(|_| n)
}

/// Streams every valid network obtained by attaching all of `taxa` to the
/// sides of `g`: ordered runs on edge sides, exactly one taxon per node side.
pub fn attach_taxa<'a>(g: &'a Generator, taxa: &[Taxon]) -> Result<Attachments<'a>> {
    if taxa.len() < g.node_sides.len() || taxa.is_empty() {
        return Err(Error::Invalid(format!(
            "{} taxa cannot fill {} node sides",
            taxa.len(),
            g.node_sides.len()
        )));
    }
    Ok(Attachments {
        g,
        taxa: taxa.to_vec(),
        lab: Labelling::new(g),
        stack: Vec::new(),
        done: false,
    })
}

/// Iterator returned by [`attach_taxa`].
pub struct Attachments<'a> {
    g: &'a Generator,
    taxa: Vec<Taxon>,
    lab: Labelling,
    stack: Vec<(Vec<Choice>, usize)>,
    done: bool,
}

impl Attachments<'_> {
    fn backtrack(&mut self) {
        let mut depth = self.stack.len();
        while let Some((choices, i)) = self.stack.last_mut() {
            depth -= 1;
            self.lab.undo(choices[*i]);
            if *i + 1 < choices.len() {
                *i += 1;
                let c = choices[*i];
                self.lab.apply(c, depth);
                return;
            }
            self.stack.pop();
        }
        self.done = true;
    }
}

impl Iterator for Attachments<'_> {
    type Item = RootedNetwork;

    fn next(&mut self) -> Option<RootedNetwork> {
        let n = self.taxa.len();
        loop {
            if self.done {
                return None;
            }
            let depth = self.stack.len();
            if depth < n {
                if self.lab.empty_node_sides() > n - depth {
                    self.backtrack();
                    continue;
                }
                let choices = self.lab.choices();
                self.lab.apply(choices[0], depth);
                self.stack.push((choices, 0));
                continue;
            }
            let out = (self.lab.empty_node_sides() == 0)
                .then(|| finish(self.lab.materialize(self.g, &self.taxa)))
                .flatten();
            self.backtrack();
            if out.is_some() {
                return out;
            }
        }
    }
}

/// Insertion search on one generator: taxa are attached one at a time and a
/// partial labelling survives only while, for every tree, some switching
/// still displays the tree restricted to the taxa placed so far.
struct SideSearch<'a> {
    g: &'a Generator,
    taxa: &'a [Taxon],
    ret_sides: Vec<[usize; 2]>,
    targets: &'a [Vec<String>],
}

impl SideSearch<'_> {
    /// Sides that must still receive a taxon: empty node sides, and parallel
    /// pairs with both sides empty (left empty they would merge, giving a
    /// network with fewer reticulations, which lower levels rule out).
    fn required(&self, lab: &Labelling) -> usize {
        let pairs = self.g.parallel.iter().filter(|&&(a, b)| lab.edge[a].is_empty() && lab.edge[b].is_empty());
        lab.empty_node_sides() + pairs.count()
    }

    /// Swapping two parallel edges is an automorphism, so the second side of
    /// a pair is only used once the first is.
    fn allowed(&self, lab: &Labelling, c: Choice) -> bool {
        match c {
            Choice::Edge(s, _) => !self.g.parallel.iter().any(|&(a, b)| b == s && lab.edge[a].is_empty()),
            Choice::Node(_) => true,
        }
    }

    /// Bit `i` of a switching keeps the second of the two edge sides
    /// entering reticulation `i`, so bits stay meaningful as taxa are added.
    fn refine(&self, lab: &Labelling, placed: usize, viable: &[u64]) -> Option<Vec<u64>> {
        let (net, entering) = lab.materialize_tracked(self.g, self.taxa);
        let any = viable.iter().fold(0, |a, b| a | b);
        let mut next = vec![0u64; viable.len()];
        for mask in (0..64).filter(|m| any >> m & 1 == 1) {
            let mut sw = net.clone();
            for (i, sides) in self.ret_sides.iter().enumerate() {
                sw.remove_edge(entering[sides[1 - (mask >> i & 1)]]);
            }
            sw.tidy();
            let c = canonical_rooted(&sw);
            for (t, v) in viable.iter().enumerate() {
                if v >> mask & 1 == 1 && c == self.targets[t][placed] {
                    next[t] |= 1 << mask;
                }
            }
        }
        next.iter().all(|&v| v != 0).then_some(next)
    }

    fn dfs(&self, lab: &mut Labelling, placed: usize, viable: &[u64]) -> Option<RootedNetwork> {
        let n = self.taxa.len();
        if self.required(lab) > n - placed {
            return None;
        }
        if placed == n {
            return finish(lab.materialize(self.g, self.taxa));
        }
        let choices: Vec<Choice> = lab.choices().into_iter().filter(|&c| self.allowed(lab, c)).collect();
        for c in choices {
            lab.apply(c, placed);
            let next = if placed + 1 >= 3 { self.refine(lab, placed + 1, viable) } else { Some(viable.to_vec()) };
            if let Some(next) = next {
                if let Some(found) = self.dfs(lab, placed + 1, &next) {
                    lab.undo(c);
                    return Some(found);
                }
            }
            lab.undo(c);
        }
        None
    }
}

/// Smallest-reticulation network displaying trees without nontrivial common
/// clusters, with at most `budget` reticulations.
fn solve_part(trees: &[RootedTree], budget: usize, limits: &Limits) -> Result<Option<(usize, RootedNetwork)>> {
    let first = &trees[0];
    if trees.iter().all(|t| labelled_isomorphic_rooted(t, first)) {
        return Ok(Some((0, first.compact())));
    }
    let taxa = conflict_order(trees);
    guard("taxa in an irreducible part", taxa.len(), limits.hn_taxa)?;
    let targets: Vec<Vec<String>> = trees
        .iter()
        .map(|t| {
            (0..=taxa.len())
                .map(|k| if k >= 3 { canonical_rooted(&restrict_rooted(t, &taxa[..k]).unwrap()) } else { String::new() })
                .collect()
        })
        .collect();
    let Some(lower) = pairwise_lower_bound(trees, budget)? else {
        return Ok(None);
    };
    for r in lower.max(1)..=budget {
        let gens = generators(r);
        let found = gens.par_iter().find_map_first(|g| {
            let ret_sides = g
                .graph
                .reticulations()
                .into_iter()
                .map(|h| {
                    let mut sides = (0..g.edge_sides.len()).filter(|&s| g.graph.endpoints(g.edge_sides[s]).1 == h);
                    [sides.next().unwrap(), sides.next().unwrap()]
                })
                .collect::<Vec<_>>();
            let all = u64::MAX >> (64 - (1 << ret_sides.len()));
            let search = SideSearch { g, taxa: &taxa, ret_sides, targets: &targets };
            search.dfs(&mut Labelling::new(g), 0, &vec![all; trees.len()])
        });
        if let Some(net) = found {
            return Ok(Some((r, net)));
        }
    }
    Ok(None)
}

/// Taxa in insertion order: each next taxon is the one forming the most
/// conflicting triples with those already chosen, so that the search meets
/// incompatibilities early.
fn conflict_order(trees: &[RootedTree]) -> Vec<Taxon> {
    let mut rest = trees[0].taxa();
    let mut order: Vec<Taxon> = Vec::new();
    let conflicts = |x: &Taxon, order: &[Taxon]| {
        let mut count = 0;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                let keep = [x.clone(), order[i].clone(), order[j].clone()];
                let mut shapes = trees.iter().map(|t| canonical_rooted(&restrict_rooted(t, &keep).unwrap()));
                let head = shapes.next().unwrap();
                if shapes.any(|s| s != head) {
                    count += 1;
                }
            }
        }
        count
    };
    while !rest.is_empty() {
        let mut best = 0;
        let mut best_score = None;
        for (i, x) in rest.iter().enumerate() {
            let score = conflicts(x, &order);
            if best_score.is_none_or(|b| score > b) {
                best = i;
                best_score = Some(score);
            }
        }
        order.push(rest.remove(best));
    }
    order
}

/// The rooted tree with a marker taxon hung above its root, unrooted.
fn with_root_marker(t: &RootedTree) -> UnrootedTree {
    let mut g = t.clone();
    let old = g.root().unwrap();
    let top = g.add_node();
    let marker = g.add_leaf(&format!("{RESERVED_PREFIX}root"));
    g.add_edge(top, old);
    g.add_edge(top, marker);
    unroot(&g)
}

/// Largest pairwise agreement-forest bound on the reticulation number, or
/// `None` if some pair already needs more than `budget`.
fn pairwise_lower_bound(trees: &[RootedTree], budget: usize) -> Result<Option<usize>> {
    let marked: Vec<UnrootedTree> = trees.iter().map(with_root_marker).collect();
    let mut best = 0;
    for i in 0..marked.len() {
        for j in i + 1..marked.len() {
            match maf_within(&marked[i], &marked[j], budget + 1)? {
                Some(f) => best = best.max(f.len() - 1),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(best))
}

fn labelled_isomorphic_rooted(a: &RootedTree, b: &RootedTree) -> bool {
    canonical_rooted(a) == canonical_rooted(b)
}

/// Nontrivial common clusters none of which contains another.
fn minimal_common_clusters(trees: &[RootedTree]) -> Vec<BTreeSet<Taxon>> {
    let n = trees[0].taxa().len();
    let mut common = clusters(&trees[0]);
    for t in &trees[1..] {
        let c = clusters(t);
        common.retain(|x| c.contains(x));
    }
    common.retain(|c| c.len() >= 2 && c.len() < n);
    common
        .iter()
        .filter(|c| !common.iter().any(|d| d.len() < c.len() && d.is_subset(c)))
        .cloned()
        .collect()
}

/// Replaces cluster `c` of `t` by the single taxon `fresh`.
fn collapse(t: &RootedTree, c: &BTreeSet<Taxon>, fresh: &str) -> RootedTree {
    let rep = c.iter().next().unwrap();
    let keep: Vec<Taxon> = t.taxa().into_iter().filter(|x| !c.contains(x) || x == rep).collect();
    let mut out = restrict_rooted(t, &keep).unwrap();
    let v = out.leaf(rep).unwrap();
    out.set_label(v, Some(fresh.to_string()));
    out
}

/// Replaces every leaf named in `pieces` by the corresponding network.
pub(crate) fn expand(n: &RootedNetwork, pieces: &BTreeMap<Taxon, RootedNetwork>) -> RootedNetwork {
    let mut out = n.clone();
    while let Some((name, leaf)) = out
        .taxon_index()
        .iter()
        .find(|(x, _)| pieces.contains_key(*x))
        .map(|(x, &v)| (x.clone(), v))
    {
        let piece = &pieces[&name];
        out.set_label(leaf, None);
        let mut map = HashMap::new();
        for v in piece.nodes() {
            let w = if Some(v) == piece.root() { leaf } else { out.add_node() };
            map.insert(v, w);
        }
        for v in piece.nodes() {
            if let Some(l) = piece.label(v) {
                out.set_label(map[&v], Some(l.to_string()));
            }
        }
        for (_, u, v) in piece.edges() {
            out.add_edge(map[&u], map[&v]);
        }
    }
    out.compact()
}

/// Result of [`hn_exact`]: the optimum, a network attaining it, and an image
/// of every input tree.
#[derive(Clone, Debug)]
pub struct HnSolution {
    pub value: usize,
    pub network: RootedNetwork,
    pub images: Vec<Image>,
}

/// Exact rooted hybridization number of `trees` if it is at most `k_max`.
///
/// Common clusters are split off first (the optimum is additive over them);
/// each remaining part is searched level by level over generators with
/// taxa attached to their sides.
pub fn hn_exact(trees: &[RootedTree], k_max: usize, limits: &Limits) -> Result<Option<HnSolution>> {
    let Some(first) = trees.first() else {
        return Err(Error::Invalid("no trees".into()));
    };
    let taxa = first.taxa();
    if trees.iter().any(|t| t.taxa() != taxa) {
        return Err(Error::TaxonMismatch);
    }
    guard("reticulations searched", k_max, limits.hn_k)?;
    let mut current: Vec<RootedTree> = trees.iter().map(RootedNetwork::compact).collect();
    let mut pieces: BTreeMap<Taxon, RootedNetwork> = BTreeMap::new();
    let mut used = 0;
    let mut counter = 0;
    loop {
        let minimal = minimal_common_clusters(&current);
        if minimal.is_empty() {
            break;
        }
        for c in minimal {
            let keep: Vec<Taxon> = c.iter().cloned().collect();
            let sub: Vec<RootedTree> = current.iter().map(|t| restrict_rooted(t, &keep).unwrap()).collect();
            let Some((h, net)) = solve_part(&sub, k_max - used, limits)? else {
                return Ok(None);
            };
            used += h;
            let fresh = loop {
                let name = format!("{RESERVED_PREFIX}h{counter}");
                counter += 1;
                if !taxa.contains(&name) {
                    break name;
                }
            };
            current = current.iter().map(|t| collapse(t, &c, &fresh)).collect();
            pieces.insert(fresh, net);
        }
    }
    let Some((h, top)) = solve_part(&current, k_max - used, limits)? else {
        return Ok(None);
    };
    used += h;
    let network = expand(&top, &pieces);
    network.validate()?;
    let mut images = Vec::new();
    for t in trees {
        match rooted_tc(&network, t)? {
            Some(img) => images.push(img),
            None => return Err(Error::Invalid("constructed network misses an input tree".into())),
        }
    }
    debug_assert_eq!(network.reticulation_number(), used);
    Ok(Some(HnSolution { value: used, network, images }))
}

/// Unrooted networks grown from `start` by one more reticulation: subdivide
/// two edges (possibly the same one twice) and join the new nodes, or hang a
/// loop below a subdivided edge.
fn unrooted_extensions(start: &UnrootedNetwork) -> Vec<UnrootedNetwork> {
    let ids = start.edge_ids();
    let mut out = Vec::new();
    for (i, &e) in ids.iter().enumerate() {
        for &f in &ids[i..] {
            let mut g = start.clone();
            let a = g.subdivide(e);
            let b = if e == f {
                let half = *g.incident(a).last().unwrap();
                g.subdivide(half)
            } else {
                g.subdivide(f)
            };
            g.add_edge(a, b);
            out.push(g);
        }
        let mut g = start.clone();
        let a = g.subdivide(e);
        let w = g.add_node();
        g.add_edge(a, w);
        g.add_edge(w, w);
        out.push(g);
    }
    out
}

/// Smallest `k <= k_max` such that some unrooted network with reticulation
/// number `k` displays every tree, found by exhaustive enumeration of the
/// networks grown from the first tree and checked with the spanning-tree oracle.
pub fn uhn_exhaustive_oracle(trees: &[UnrootedTree], k_max: usize, limits: &Limits) -> Result<Option<usize>> {
    let Some(first) = trees.first() else {
        return Err(Error::Invalid("no trees".into()));
    };
    guard("taxa for exhaustive network oracle", first.taxon_count(), limits.uhn_oracle_taxa)?;
    guard("reticulations for exhaustive network oracle", k_max, limits.uhn_oracle_k)?;
    if trees.iter().any(|t| t.taxa() != first.taxa()) {
        return Err(Error::TaxonMismatch);
    }
    if trees.iter().all(|t| labelled_isomorphic(t, first).unwrap_or(false)) {
        return Ok(Some(0));
    }
    let mut level = vec![first.compact()];
    for k in 1..=k_max {
        level = level.iter().flat_map(unrooted_extensions).collect();
        let found = level.par_iter().find_any(|n| {
            n.validate().is_ok()
                && trees[1..]
                    .iter()
                    .all(|t| utc_oracle(n, t, limits).map(|r| r.is_some()).unwrap_or(false))
        });
        if found.is_some() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
