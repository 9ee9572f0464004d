//! Instance generators from hardness constructions: disjoint-paths instances
//! turned into tree containment, rooted pairs turned into root-uncertain
//! pairs, and the map from a root-uncertain network back to a rooted one.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    check_user_taxa, clusters, edge_for_split, restrict_rooted, root_at_edge, unroot, Image, NodeId, RootedNetwork,
    RootedTree, Taxon, UnrootedNetwork, UnrootedTree, RESERVED_PREFIX,
};
use crate::newick::{parse_unrooted_tree, write_rooted_tree};
use crate::ruhn::clean;
use crate::utc::rooted_tc;

/// Disjoint-paths instance on an undirected multigraph whose nodes are all
/// labelled by name. A solution joins every pair by a path; two paths may
/// meet only at a node where both end, and never share an edge.
#[derive(Clone, Debug)]
pub struct NdpInstance {
    pub graph: UnrootedNetwork,
    pub pairs: Vec<(String, String)>,
}

impl NdpInstance {
    /// Builds and validates an instance; nodes named only in pairs are isolated.
    pub fn new(edges: &[(&str, &str)], pairs: &[(&str, &str)]) -> Result<Self> {
        let mut graph = UnrootedNetwork::new();
        let node = |g: &mut UnrootedNetwork, name: &str| g.leaf(name).unwrap_or_else(|| g.add_leaf(name));
        for &(u, v) in edges {
            let (a, b) = (node(&mut graph, u), node(&mut graph, v));
            graph.add_edge(a, b);
        }
        for &(s, t) in pairs {
            node(&mut graph, s);
            node(&mut graph, t);
        }
        let inst = NdpInstance { graph, pairs: pairs.iter().map(|&(s, t)| (s.to_string(), t.to_string())).collect() };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_user_taxa(self.graph.taxon_index().keys())?;
        self.check_pairs()
    }

    fn check_pairs(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::Invalid("no terminal pairs".into()));
        }
        for (s, t) in &self.pairs {
            for x in [s, t] {
                if self.graph.leaf(x).is_none() {
                    return Err(Error::UnknownTaxon(x.clone()));
                }
            }
            if s == t {
                return Err(Error::Invalid(format!("pair joins {s} to itself")));
            }
        }
        Ok(())
    }

    pub fn name(&self, v: NodeId) -> &str {
        self.graph.label(v).expect("every node is named")
    }

    pub fn terminals(&self) -> BTreeSet<&str> {
        self.pairs.iter().flat_map(|(s, t)| [s.as_str(), t.as_str()]).collect()
    }
}

impl fmt::Display for NdpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph")?;
        for (_, u, v) in self.graph.edges() {
            writeln!(f, "{} {}", self.name(u), self.name(v))?;
        }
        for (s, t) in &self.pairs {
            writeln!(f, "pair {s} {t}")?;
        }
        Ok(())
    }
}

/// Text form: an optional `graph` line, `u v` edge lines, `pair s t` lines;
/// `#` starts a comment.
impl FromStr for NdpInstance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut pairs = Vec::new();
        let mut pos = 0;
        for line in text.lines() {
            let start = pos;
            pos += line.len() + 1;
            let words: Vec<&str> = line.split('#').next().unwrap().split_whitespace().collect();
            match words.as_slice() {
                [] | ["graph"] => {}
                ["pair", s, t] => pairs.push((*s, *t)),
                [u, v] => edges.push((*u, *v)),
                _ => return Err(Error::Parse { pos: start, msg: format!("unrecognised line {line:?}") }),
            }
        }
        NdpInstance::new(&edges, &pairs)
    }
}

/// One of the three terminal-splitting gadgets. External edges of the
/// replaced terminal attach at the ports in order; its pairs move to the
/// gadget terminals in order; extra pairs are added to the instance.
#[derive(Clone, Debug)]
pub struct GadgetTemplate {
    pub ports: Vec<String>,
    pub terminals: Vec<String>,
    pub extra_pairs: Vec<(String, String)>,
    pub edges: Vec<(String, String)>,
}

impl GadgetTemplate {
    fn parse(text: &str) -> GadgetTemplate {
        let mut t = GadgetTemplate { ports: vec![], terminals: vec![], extra_pairs: vec![], edges: vec![] };
        for line in text.lines() {
            let words: Vec<String> =
                line.split('#').next().unwrap().split_whitespace().map(str::to_string).collect();
            match words.as_slice() {
                [] => {}
                [k, x] if k == "port" => t.ports.push(x.clone()),
                [k, x] if k == "terminal" => t.terminals.push(x.clone()),
                [k, a, b] if k == "extra" => t.extra_pairs.push((a.clone(), b.clone())),
                [a, b] => t.edges.push((a.clone(), b.clone())),
                _ => panic!("bad template line {line:?}"),
            }
        }
        t
    }

    pub fn nodes(&self) -> BTreeSet<&str> {
        self.edges.iter().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect()
    }
}

/// Gadget for a terminal in `pairs` pairs (1 to 3).
pub fn gadget_template(pairs: usize) -> Option<GadgetTemplate> {
    let text = match pairs {
        1 => include_str!("../templates/guard1.txt"),
        2 => include_str!("../templates/split2.txt"),
        3 => include_str!("../templates/split3.txt"),
        _ => return None,
    };
    Some(GadgetTemplate::parse(text))
}

fn check_max_degree(g: &UnrootedNetwork) -> Result<()> {
    for v in g.nodes() {
        if g.degree(v) > 3 {
            return Err(Error::Invalid(format!("node {} has degree {} > 3", g.label(v).unwrap(), g.degree(v))));
        }
    }
    Ok(())
}

fn remove_loops(g: &mut UnrootedNetwork) {
    let loops: Vec<_> = g.edges().filter(|&(_, u, v)| u == v).map(|(e, _, _)| e).collect();
    for e in loops {
        g.remove_edge(e);
    }
}

/// Replaces terminal `v` by a copy of `tpl`; returns the new names of the
/// template terminals and extra pairs.
fn apply_gadget(g: &mut UnrootedNetwork, v: NodeId, tpl: &GadgetTemplate) -> (Vec<String>, Vec<(String, String)>) {
    let base = g.label(v).unwrap().to_string();
    let fresh = |x: &str| format!("{RESERVED_PREFIX}{base}.{x}");
    let mut ids = BTreeMap::new();
    for x in tpl.nodes() {
        ids.insert(x, g.add_leaf(&fresh(x)));
    }
    for (a, b) in &tpl.edges {
        g.add_edge(ids[a.as_str()], ids[b.as_str()]);
    }
    let mut incident: Vec<(String, NodeId)> = g
        .incident(v)
        .iter()
        .map(|&e| {
            let w = g.other_end(e, v);
            (g.label(w).unwrap().to_string(), w)
        })
        .collect();
    incident.sort();
    g.remove_node(v);
    for ((_, w), port) in incident.into_iter().zip(&tpl.ports) {
        g.add_edge(ids[port.as_str()], w);
    }
    let terminals = tpl.terminals.iter().map(|x| fresh(x)).collect();
    let extra = tpl.extra_pairs.iter().map(|(a, b)| (fresh(a), fresh(b))).collect();
    (terminals, extra)
}

/// Applies one cleanup step; false when nothing applies.
fn cleanup_step(g: &mut UnrootedNetwork, terminals: &BTreeSet<String>) -> bool {
    for (e, u, v) in g.edges().collect::<Vec<_>>() {
        if u == v {
            g.remove_edge(e);
            return true;
        }
        if g.incident(u).iter().any(|&f| f < e && g.other_end(f, u) == v) {
            g.remove_edge(e);
            return true;
        }
    }
    for v in g.nodes().collect::<Vec<_>>() {
        if terminals.contains(g.label(v).unwrap()) {
            continue;
        }
        match g.degree(v) {
            0 | 1 => {
                g.remove_node(v);
                return true;
            }
            2 => {
                g.suppress(v);
                return true;
            }
            _ => {}
        }
    }
    false
}

/// Rewrites the instance so that every node has degree 1 or 3, a node has
/// degree 1 exactly when it is a terminal, and each terminal is in exactly
/// one pair. Gadgets go to terminals in three pairs first, then two, then
/// one, by name within each group. Pairs come out sorted, each written with
/// its smaller name first.
pub fn normalize(inst: &NdpInstance) -> Result<NdpInstance> {
    inst.validate()?;
    let mut g = inst.graph.clone();
    remove_loops(&mut g);
    check_max_degree(&g)?;
    let mut pairs = inst.pairs.clone();
    let mut uses: BTreeMap<String, Vec<(usize, bool)>> = BTreeMap::new();
    for (i, (s, t)) in pairs.iter().enumerate() {
        uses.entry(s.clone()).or_default().push((i, false));
        uses.entry(t.clone()).or_default().push((i, true));
    }
    if let Some((x, u)) = uses.iter().find(|(_, u)| u.len() > 3) {
        return Err(Error::TrivialNo(format!("{x} is in {} pairs", u.len())));
    }
    let mut order: Vec<(&String, &Vec<(usize, bool)>)> = uses.iter().collect();
    order.sort_by_key(|(x, u)| (Reverse(u.len()), *x));
    for (x, u) in order {
        let v = g.leaf(x).unwrap();
        if u.len() == 1 && g.degree(v) < 2 {
            continue;
        }
        let (terminals, extra) = apply_gadget(&mut g, v, &gadget_template(u.len()).unwrap());
        for (&(i, second), s) in u.iter().zip(terminals) {
            if second {
                pairs[i].1 = s;
            } else {
                pairs[i].0 = s;
            }
        }
        pairs.extend(extra);
    }
    let terminals: BTreeSet<String> = pairs.iter().flat_map(|(s, t)| [s.clone(), t.clone()]).collect();
    while cleanup_step(&mut g, &terminals) {}
    for x in &terminals {
        if g.degree(g.leaf(x).unwrap()) == 0 {
            return Err(Error::TrivialNo(format!("terminal {x} is isolated")));
        }
    }
    let mut comp = BTreeMap::new();
    for (i, c) in g.components().into_iter().enumerate() {
        if c.iter().all(|&v| !terminals.contains(g.label(v).unwrap())) {
            for v in c {
                g.remove_node(v);
            }
        } else {
            comp.extend(c.into_iter().map(|v| (v, i)));
        }
    }
    for (s, t) in &pairs {
        if comp[&g.leaf(s).unwrap()] != comp[&g.leaf(t).unwrap()] {
            return Err(Error::TrivialNo(format!("{s} and {t} are disconnected")));
        }
    }
    for p in pairs.iter_mut() {
        if p.0 > p.1 {
            std::mem::swap(&mut p.0, &mut p.1);
        }
    }
    pairs.sort();
    Ok(NdpInstance { graph: g.compact(), pairs })
}

/// A tree containment instance built from a disjoint-paths instance, with
/// the normalized instance it encodes.
#[derive(Clone, Debug)]
pub struct UtcGadget {
    pub network: UnrootedNetwork,
    pub tree: UnrootedTree,
    pub normalized: NdpInstance,
}

/// Builds a network and tree on `rho`, `s1`, `t1`, ... such that the network
/// displays the tree exactly when the disjoint-paths instance is solvable.
/// The tree hangs cherries `(si, ti)` off a path from `rho`; the network has
/// the same path and leaves `si`, while each cherry node also leads into the
/// normalized graph at the terminal of pair `i` whose partner becomes leaf `ti`.
pub fn ndp_to_utc(inst: &NdpInstance) -> Result<UtcGadget> {
    let normalized = normalize(inst)?;
    let k = normalized.pairs.len();
    let mut spine = format!("s{k},t{k}");
    for i in (1..k).rev() {
        spine = format!("(s{i},t{i}),({spine})");
    }
    let tree = parse_unrooted_tree(&format!("(rho,{spine});"))?;
    let mut n = tree.clone();
    let g = &normalized.graph;
    let copy: BTreeMap<NodeId, NodeId> = g.nodes().map(|v| (v, n.add_node())).collect();
    for (_, u, v) in g.edges() {
        n.add_edge(copy[&u], copy[&v]);
    }
    for (i, (s, t)) in normalized.pairs.iter().enumerate() {
        let leaf = n.leaf(&format!("t{}", i + 1)).unwrap();
        let x = n.parent_of_leaf(&format!("t{}", i + 1)).unwrap();
        n.remove_node(leaf);
        n.set_label(copy[&g.leaf(t).unwrap()], Some(format!("t{}", i + 1)));
        let entry = copy[&g.leaf(s).unwrap()];
        n.add_edge(x, entry);
        n.suppress(entry);
    }
    let network = n.compact();
    network.validate()?;
    Ok(UtcGadget { network, tree, normalized })
}

struct PathSearch<'a> {
    inst: &'a NdpInstance,
    terminals: BTreeSet<NodeId>,
    used_nodes: BTreeSet<NodeId>,
    used_edges: BTreeSet<usize>,
    paths: Vec<Vec<NodeId>>,
}

impl PathSearch<'_> {
    fn route(&mut self, i: usize) -> bool {
        let Some((s, t)) = self.inst.pairs.get(i) else { return true };
        let g = &self.inst.graph;
        let (s, t) = (g.leaf(s).unwrap(), g.leaf(t).unwrap());
        let mut path = vec![s];
        let mut edges = Vec::new();
        self.extend(i, t, &mut path, &mut edges)
    }

    fn extend(&mut self, i: usize, t: NodeId, path: &mut Vec<NodeId>, edges: &mut Vec<usize>) -> bool {
        let g = &self.inst.graph;
        let v = *path.last().unwrap();
        for &e in g.incident(v) {
            if self.used_edges.contains(&e) || edges.contains(&e) {
                continue;
            }
            let w = g.other_end(e, v);
            if w == t {
                path.push(w);
                edges.push(e);
                self.used_nodes.extend(path.iter().copied());
                self.used_edges.extend(edges.iter().copied());
                self.paths.push(path.clone());
                if self.route(i + 1) {
                    return true;
                }
                self.paths.pop();
                for x in edges.iter() {
                    self.used_edges.remove(x);
                }
                self.used_nodes = self.paths.iter().flatten().copied().collect();
                path.pop();
                edges.pop();
            } else if !self.terminals.contains(&w) && !self.used_nodes.contains(&w) && !path.contains(&w) {
                path.push(w);
                edges.push(e);
                if self.extend(i, t, path, edges) {
                    return true;
                }
                path.pop();
                edges.pop();
            }
        }
        false
    }
}

/// Exhaustive path search; returns one path per pair, as node names.
/// Exponential, meant for graphs of a handful of nodes.
pub fn ndp_brute(inst: &NdpInstance) -> Result<Option<Vec<Vec<String>>>> {
    inst.check_pairs()?;
    let g = &inst.graph;
    let terminals = inst.terminals().into_iter().map(|x| g.leaf(x).unwrap()).collect();
    let mut search =
        PathSearch { inst, terminals, used_nodes: BTreeSet::new(), used_edges: BTreeSet::new(), paths: Vec::new() };
    if !search.route(0) {
        return Ok(None);
    }
    Ok(Some(search.paths.iter().map(|p| p.iter().map(|&v| inst.name(v).to_string()).collect()).collect()))
}

/// Random connected instance of maximum degree 3 on nodes `v0`, `v1`, ...
/// with between one and `max_pairs` pairs.
pub fn random_ndp<R: Rng>(nodes: usize, max_pairs: usize, rng: &mut R) -> NdpInstance {
    assert!(nodes >= 2 && max_pairs >= 1);
    let names: Vec<String> = (0..nodes).map(|i| format!("v{i}")).collect();
    let mut deg = vec![0usize; nodes];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 1..nodes {
        let open: Vec<usize> = (0..i).filter(|&j| deg[j] < 3).collect();
        let j = open[rng.gen_range(0..open.len())];
        edges.push((j, i));
        deg[i] += 1;
        deg[j] += 1;
    }
    for _ in 0..rng.gen_range(0..=nodes / 3) {
        let open: Vec<usize> = (0..nodes).filter(|&j| deg[j] < 3).collect();
        if open.len() < 2 {
            break;
        }
        let a = open[rng.gen_range(0..open.len())];
        let b = open[rng.gen_range(0..open.len())];
        if a != b && !edges.contains(&(a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
            deg[a] += 1;
            deg[b] += 1;
        }
    }
    let pairs: Vec<(usize, usize)> = (0..rng.gen_range(1..=max_pairs))
        .map(|_| {
            let a = rng.gen_range(0..nodes);
            let b = (a + rng.gen_range(1..nodes)) % nodes;
            (a, b)
        })
        .collect();
    let e: Vec<(&str, &str)> = edges.iter().map(|&(a, b)| (names[a].as_str(), names[b].as_str())).collect();
    let p: Vec<(&str, &str)> = pairs.iter().map(|&(a, b)| (names[a].as_str(), names[b].as_str())).collect();
    NdpInstance::new(&e, &p).expect("generated instance is valid")
}

/// Length of each caterpillar part attached by [`hn_to_ruhn`], for `n` taxa.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaterpillarLength {
    /// `n + 1` taxa per part.
    Short,
    /// `2n + 3` taxa per part.
    Long,
}

impl CaterpillarLength {
    pub fn part_len(self, n: usize) -> usize {
        match self {
            CaterpillarLength::Short => n + 1,
            CaterpillarLength::Long => 2 * n + 3,
        }
    }
}

fn caterpillar_index(x: &str) -> Option<(char, usize)> {
    let head = x.chars().next()?;
    let rest = &x[head.len_utf8()..];
    if !matches!(head, 'c' | 'd') || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((head, rest.parse().ok()?))
}

fn hang_on_caterpillar(order: &[String], subtree: &str) -> String {
    let last = order.len() - 1;
    let mut acc = format!("({},{subtree})", order[last]);
    for x in order[2..last].iter().rev() {
        acc = format!("({x},{acc})");
    }
    format!("({},{},{acc});", order[0], order[1])
}

/// Unrooted trees whose root-uncertain value is one more than the rooted
/// value of `(t1, t2)`: each input hangs below a caterpillar
/// `c0 .. cm, d0 .. dm` (attached next to the last `d`), with the `c` part
/// reversed in the second tree.
pub fn hn_to_ruhn(t1: &RootedTree, t2: &RootedTree, len: CaterpillarLength) -> Result<(UnrootedTree, UnrootedTree)> {
    let taxa = t1.taxa();
    if taxa != t2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    if taxa.is_empty() {
        return Err(Error::Invalid("no taxa".into()));
    }
    check_user_taxa(&taxa)?;
    if let Some(x) = taxa.iter().find(|x| caterpillar_index(x).is_some()) {
        return Err(Error::Invalid(format!("taxon {x} collides with a caterpillar name")));
    }
    let m = len.part_len(taxa.len());
    let cs: Vec<String> = (0..m).map(|i| format!("c{i}")).collect();
    let ds: Vec<String> = (0..m).map(|i| format!("d{i}")).collect();
    let build = |c: &[String], t: &RootedTree| {
        let order: Vec<String> = c.iter().chain(&ds).cloned().collect();
        parse_unrooted_tree(&hang_on_caterpillar(&order, write_rooted_tree(t).trim_end_matches(';')))
    };
    let rev: Vec<String> = cs.iter().rev().cloned().collect();
    Ok((build(&cs, t1)?, build(&rev, t2)?))
}

/// Rooted tree shown by `img` in `n`.
fn image_tree(n: &RootedNetwork, img: &Image) -> Result<RootedTree> {
    let mut g = n.clone();
    for (e, _, _) in n.edges() {
        if !img.host_edges.contains(&e) {
            g.remove_edge(e);
        }
    }
    for v in n.nodes() {
        if g.indegree(v) + g.outdegree(v) == 0 && g.label(v).is_none() {
            g.remove_node(v);
        }
    }
    g.tidy();
    let t = g.compact();
    t.validate()?;
    if t.reticulation_number() != 0 {
        return Err(Error::Invalid("image is not a tree".into()));
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Orientation {
    Low,
    High,
    Both,
}

/// How a caterpillar part `p0 .. pm` sits in a rooted tree: `Low` when only
/// `{p0, p1}` is a cluster of the restriction, `High` when only
/// `{pm-1, pm}` is.
fn orientation(t: &RootedTree, part: &[Taxon]) -> Result<Orientation> {
    let cl = clusters(&restrict_rooted(t, part)?);
    let m = part.len();
    let low = cl.contains(&BTreeSet::from([part[0].clone(), part[1].clone()]));
    let high = cl.contains(&BTreeSet::from([part[m - 2].clone(), part[m - 1].clone()]));
    Ok(match (low, high) {
        (true, false) => Orientation::Low,
        (false, true) => Orientation::High,
        _ => Orientation::Both,
    })
}

/// The input rooted tree recovered from a rooting of a constructed tree: the
/// restriction to `x`, rooted where the caterpillar attaches.
fn attached_tree(r: &RootedTree, x: &BTreeSet<Taxon>) -> Result<RootedTree> {
    let keep: Vec<Taxon> = x.iter().cloned().collect();
    if keep.len() == 1 {
        return restrict_rooted(r, &keep);
    }
    let u = unroot(r);
    let e = edge_for_split(&u, x).ok_or_else(|| Error::Invalid("taxa do not form a split".into()))?;
    restrict_rooted(&root_at_edge(&u, e)?, &keep)
}

/// Two rooted trees on the same taxa joined under a new root, each leaf pair
/// merged into a reticulation above the taxon.
pub fn merged_network(t1: &RootedTree, t2: &RootedTree) -> RootedNetwork {
    let mut n = RootedNetwork::new();
    if t1.taxa().len() == 1 {
        n.add_leaf(&t1.taxa()[0]);
        return n;
    }
    let root = n.add_node();
    let tips: BTreeMap<Taxon, NodeId> = t1
        .taxa()
        .into_iter()
        .map(|x| {
            let h = n.add_node();
            let leaf = n.add_leaf(&x);
            n.add_edge(h, leaf);
            (x, h)
        })
        .collect();
    for t in [t1, t2] {
        let map: BTreeMap<NodeId, NodeId> = t
            .nodes()
            .map(|v| (v, t.label(v).map_or_else(|| n.add_node(), |x| tips[x])))
            .collect();
        for (_, u, v) in t.edges() {
            n.add_edge(map[&u], map[&v]);
        }
        n.add_edge(root, map[&t.root().unwrap()]);
    }
    n.compact()
}

/// Result of mapping a root-uncertain network back to the rooted inputs.
#[derive(Clone, Debug)]
pub struct BackMap {
    pub network: RootedNetwork,
    /// Reticulations of the returned network.
    pub p: usize,
    /// Reticulations of the given network.
    pub q: usize,
    /// Whether the rootings orient a caterpillar part oppositely, in which
    /// case the merged network of the two inputs is returned.
    pub stupid: bool,
}

/// Maps a network displaying rootings of the two trees from [`hn_to_ruhn`]
/// (with the images given) to a network on the original taxa displaying both
/// original rooted trees. Sensible rootings keep only the image edges below
/// the original taxa's lowest common ancestor in each image; a returned
/// network keeping every reticulation is an error.
pub fn backmap_restriction(np: &RootedNetwork, img1: &Image, img2: &Image) -> Result<BackMap> {
    let q = np.reticulation_number();
    let r1 = image_tree(np, img1)?;
    let r2 = image_tree(np, img2)?;
    if r1.taxa() != r2.taxa() {
        return Err(Error::TaxonMismatch);
    }
    let mut cs = Vec::new();
    let mut ds = Vec::new();
    let mut x = BTreeSet::new();
    for t in r1.taxa() {
        match caterpillar_index(&t) {
            Some(('c', i)) => cs.push((i, t)),
            Some((_, i)) => ds.push((i, t)),
            None => {
                x.insert(t);
            }
        }
    }
    cs.sort();
    ds.sort();
    let cs: Vec<Taxon> = cs.into_iter().map(|(_, t)| t).collect();
    let ds: Vec<Taxon> = ds.into_iter().map(|(_, t)| t).collect();
    if x.is_empty() || cs.len() < 2 || cs.len() != ds.len() {
        return Err(Error::Invalid("images do not show a constructed pair".into()));
    }
    let t1 = attached_tree(&r1, &x)?;
    let t2 = attached_tree(&r2, &x)?;
    let mut stupid = false;
    for part in [&cs, &ds] {
        let pair = (orientation(&r1, part)?, orientation(&r2, part)?);
        stupid |= matches!(pair, (Orientation::Low, Orientation::High) | (Orientation::High, Orientation::Low));
    }
    if stupid {
        let network = merged_network(&t1, &t2);
        let p = network.reticulation_number();
        return Ok(BackMap { network, p, q, stupid });
    }
    let network = if x.len() == 1 {
        let mut n = RootedNetwork::new();
        n.add_leaf(x.first().unwrap());
        n
    } else {
        restrict_to_images(np, [img1, img2], &x)?
    };
    for t in [&t1, &t2] {
        if rooted_tc(&network, t)?.is_none() {
            return Err(Error::Lift("restricted network misses an input tree".into()));
        }
    }
    let p = network.reticulation_number();
    if p >= q {
        return Err(Error::Lift(format!("restriction kept all {q} reticulations")));
    }
    Ok(BackMap { network, p, q, stupid })
}

/// Union of the image edges strictly below the lowest common ancestor of
/// `x` in each image, with a new root when the two ancestors differ,
/// repaired to a binary network.
fn restrict_to_images(np: &RootedNetwork, imgs: [&Image; 2], x: &BTreeSet<Taxon>) -> Result<RootedNetwork> {
    let order = np.topological_order().ok_or_else(|| Error::Invalid("cyclic network".into()))?;
    let mut keep = BTreeSet::new();
    for img in imgs {
        let mut below: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &v in order.iter().rev() {
            let own = usize::from(np.label(v).is_some_and(|t| x.contains(t)));
            let sum: usize = np
                .out_edges(v)
                .iter()
                .filter(|e| img.host_edges.contains(e))
                .map(|&e| below[&np.endpoints(e).1])
                .sum();
            below.insert(v, own + sum);
        }
        keep.extend(img.host_edges.iter().copied().filter(|&e| {
            let c = below[&np.endpoints(e).1];
            c >= 1 && c < x.len()
        }));
    }
    let mut g = np.clone();
    for (e, _, _) in np.edges() {
        if !keep.contains(&e) {
            g.remove_edge(e);
        }
    }
    for v in np.nodes() {
        if g.indegree(v) + g.outdegree(v) == 0 {
            g.remove_node(v);
        }
    }
    let sources: Vec<NodeId> = g.nodes().filter(|&v| g.indegree(v) == 0).collect();
    if sources.len() > 1 {
        let root = g.add_node();
        for s in sources {
            g.add_edge(root, s);
        }
    }
    clean(&mut g);
    for v in g.nodes().collect::<Vec<_>>() {
        if g.indegree(v) == 2 && g.outdegree(v) == 2 {
            let w = g.add_node();
            for e in g.out_edges(v).to_vec() {
                let c = g.endpoints(e).1;
                g.remove_edge(e);
                g.add_edge(w, c);
            }
            g.add_edge(v, w);
        }
    }
    clean(&mut g);
    let g = g.compact();
    g.validate()?;
    Ok(g)
}

/// Parameters of the approximation-preserving map from rooted to
/// root-uncertain instances: `alpha` in (1, 2], `beta` = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LReductionParams {
    pub alpha: Ratio<u64>,
    pub beta: Ratio<u64>,
}

impl LReductionParams {
    pub fn new(alpha: Ratio<u64>) -> Result<Self> {
        let one = Ratio::from_integer(1);
        if alpha <= one || alpha > Ratio::from_integer(2) {
            return Err(Error::Invalid(format!("alpha {alpha} outside (1, 2]")));
        }
        Ok(LReductionParams { alpha, beta: one })
    }

    /// Rooted values below this bound are solved exactly instead of mapped.
    pub fn exact_below(&self) -> Ratio<u64> {
        Ratio::from_integer(1) / (self.alpha - 1)
    }

    pub fn solve_exactly(&self, rooted_value: usize) -> bool {
        Ratio::from_integer(rooted_value as u64) < self.exact_below()
    }

    /// Optimum of the mapped instance is within `alpha` of the original one.
    pub fn forward_holds(&self, rooted_value: usize, uncertain_value: usize) -> bool {
        Ratio::from_integer(uncertain_value as u64) <= self.alpha * rooted_value as u64
    }

    /// Gap of the mapped-back solution (`p` reticulations) is within `beta`
    /// times the gap of the given one (`q` reticulations).
    pub fn backward_holds(&self, p: usize, rooted_value: usize, q: usize, uncertain_value: usize) -> bool {
        Ratio::from_integer(p.abs_diff(rooted_value) as u64) <= self.beta * q.abs_diff(uncertain_value) as u64
    }
}
