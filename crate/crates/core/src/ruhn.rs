//! Root-uncertain hybridization number: kernelize, try every rooting of the
//! kernel trees, solve the rooted problem exactly, and lift the network back
//! to the original taxa.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{guard, Error, Result};
use crate::hn::{expand, hn_exact};
use crate::model::{edge_split, root_at_edge, EdgeId, Image, NodeId, RootedNetwork, Taxon, UnrootedTree};
use crate::newick::write_rooted_network;
use crate::reduce::{kernelize_ruhn, ReductionLog, Step};
use crate::utc::rooted_tc;
use crate::Limits;

/// Optimal root-uncertain solution: a rooting of every input tree (an edge
/// id of that tree) and a rooted network displaying all rooted trees.
#[derive(Clone, Debug)]
pub struct RuhnSolution {
    pub value: usize,
    pub rootings: Vec<EdgeId>,
    pub network: RootedNetwork,
    pub images: Vec<Image>,
}

impl RuhnSolution {
    /// Text form: the value, one `root <name> <edge>` line per tree (the edge
    /// written as the taxa on its smaller side), the network in eNewick, its
    /// edge list, and the image edges per tree. Edges are `tail>head` with
    /// leaves named by taxon and other nodes as `n<id>`.
    pub fn render(&self, trees: &[UnrootedTree], names: &[String]) -> String {
        let mut out = format!("h_ru = {}\n", self.value);
        for ((t, &e), name) in trees.iter().zip(&self.rootings).zip(names) {
            writeln!(out, "root {name} {}", split_text(t, e)).unwrap();
        }
        writeln!(out, "{}", write_rooted_network(&self.network)).unwrap();
        let all: BTreeSet<EdgeId> = self.network.edges().map(|(e, _, _)| e).collect();
        writeln!(out, "edges {}", edge_text(&self.network, &all)).unwrap();
        for (img, name) in self.images.iter().zip(names) {
            writeln!(out, "image {name} {}", edge_text(&self.network, &img.host_edges)).unwrap();
        }
        out
    }
}

/// Space-separated `tail>head` list of the given edges.
pub fn edge_text(n: &RootedNetwork, edges: &BTreeSet<EdgeId>) -> String {
    let name = |v: NodeId| n.label(v).map_or_else(|| format!("n{v}"), str::to_string);
    edges
        .iter()
        .map(|&e| {
            let (u, v) = n.endpoints(e);
            format!("{}>{}", name(u), name(v))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The smaller side of the split of `e`; ties go to the side holding the
/// smallest taxon.
pub fn split_text(t: &UnrootedTree, e: EdgeId) -> String {
    let side = edge_split(t, e);
    let other: BTreeSet<Taxon> = t.taxa().into_iter().filter(|x| !side.contains(x)).collect();
    let pick = if side.len() < other.len() || (side.len() == other.len() && side.first() < other.first()) {
        side
    } else {
        other
    };
    pick.into_iter().collect::<Vec<_>>().join(",")
}

/// Repeats tidying and merging of parallel edges into a reticulation until
/// nothing changes.
pub(crate) fn clean(n: &mut RootedNetwork) {
    loop {
        n.tidy();
        let doubled = n.nodes().find_map(|v| {
            let out = n.out_edges(v);
            (out.len() == 2 && n.endpoints(out[0]).1 == n.endpoints(out[1]).1).then(|| out[1])
        });
        match doubled {
            Some(e) => n.remove_edge(e),
            None => return,
        }
    }
}

/// Leaves whose parent is a tree node, grouped into maximal runs of such
/// parents joined by edges; each run lists its taxa from top to bottom.
fn side_runs(n: &RootedNetwork) -> Vec<Vec<Taxon>> {
    let leaf_child = |v: NodeId| n.children(v).find(|&c| n.label(c).is_some());
    let on_side = |v: NodeId| n.indegree(v) == 1 && n.outdegree(v) == 2 && leaf_child(v).is_some();
    let mut runs = Vec::new();
    for v in n.nodes().filter(|&v| on_side(v)) {
        if n.parents(v).any(&on_side) {
            continue;
        }
        let mut run = Vec::new();
        let mut cur = Some(v);
        while let Some(w) = cur {
            let leaves: Vec<NodeId> = n.children(w).filter(|&c| n.label(c).is_some()).collect();
            run.extend(leaves.iter().map(|&l| n.label(l).unwrap().to_string()));
            cur = n.children(w).find(|&c| n.label(c).is_none() && on_side(c));
        }
        runs.push(run);
    }
    runs.sort();
    runs
}

/// Puts the taxa of `chain` back next to the kept chain taxon sharing a side
/// with another chain taxon, so that the chain (or its reverse) runs along
/// that side.
fn expand_chain(n: &RootedNetwork, chain: &[Taxon], kept: usize) -> Result<RootedNetwork> {
    let index: BTreeMap<&str, usize> = chain[..kept].iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();
    let mut pick = None;
    'runs: for run in side_runs(n) {
        let found: Vec<usize> = run.iter().filter_map(|x| index.get(x.as_str()).copied()).collect();
        for a in 0..found.len() {
            for b in a + 1..found.len() {
                let (i, j) = (found[a], found[b]);
                let excluded = if i < j { (i, j) == (0, 1) } else { (j, i) == (kept - 2, kept - 1) };
                if !excluded {
                    pick = Some((i, j));
                    break 'runs;
                }
            }
        }
    }
    let (i, j) = pick.ok_or_else(|| Error::Lift("no side holds two usable chain taxa".into()))?;
    let mut out = n.clone();
    for x in chain[..kept].iter().filter(|x| **x != chain[i]) {
        let leaf = out.leaf(x).unwrap();
        out.remove_node(leaf);
    }
    clean(&mut out);
    let leaf = out.leaf(&chain[i]).unwrap();
    let parent = out.parents(leaf).next().unwrap();
    let order: Vec<&Taxon> = if i < j { chain.iter().collect() } else { chain.iter().rev().collect() };
    let at = order.iter().position(|x| **x == chain[i]).unwrap();
    for x in &order[..at] {
        let e = out.in_edges(parent)[0];
        let w = out.subdivide(e);
        let l = out.add_leaf(x);
        out.add_edge(w, l);
    }
    for x in order[at + 1..].iter().rev() {
        let e = *out.out_edges(parent).iter().find(|&&e| out.endpoints(e).1 != leaf).unwrap();
        let w = out.subdivide(e);
        let l = out.add_leaf(x);
        out.add_edge(w, l);
    }
    Ok(out.compact())
}

/// Maps a network on the kernel taxa back to the original taxa by undoing
/// the logged reductions in reverse.
pub fn lift_network(kernel_network: &RootedNetwork, log: &ReductionLog) -> Result<RootedNetwork> {
    let mut n = kernel_network.clone();
    for step in log.steps.iter().rev() {
        match step {
            Step::Cps { fresh, shape, .. } => {
                n = expand(&n, &BTreeMap::from([(fresh.clone(), shape.clone())]));
            }
            Step::Cc { d, chain } => n = expand_chain(&n, chain, *d)?,
            Step::Prune { .. } | Step::Trivial(_) => {}
            Step::Nc { .. } => return Err(Error::Lift("network chain steps do not occur here".into())),
        }
    }
    n.validate()?;
    Ok(n)
}

/// First edge (by id) rooting `t` so that `n` displays it, with the image.
fn find_rooting(n: &RootedNetwork, t: &UnrootedTree) -> Result<Option<(EdgeId, Image)>> {
    if t.edge_count() == 0 {
        return Ok(None);
    }
    for e in t.edge_ids() {
        if let Some(img) = rooted_tc(n, &root_at_edge(t, e)?)? {
            return Ok(Some((e, img)));
        }
    }
    Ok(None)
}

fn solution_from(network: RootedNetwork, trees: &[UnrootedTree]) -> Result<RuhnSolution> {
    let mut rootings = Vec::new();
    let mut images = Vec::new();
    for t in trees {
        let (e, img) = find_rooting(&network, t)?
            .ok_or_else(|| Error::Lift("lifted network displays no rooting of an input tree".into()))?;
        rootings.push(e);
        images.push(img);
    }
    Ok(RuhnSolution { value: network.reticulation_number(), rootings, network, images })
}

/// Exact root-uncertain hybridization number if it is at most `k_max`,
/// deepening one level at a time.
pub fn ruhn_exact(trees: &[UnrootedTree], k_max: usize, limits: &Limits) -> Result<Option<RuhnSolution>> {
    let Some(first) = trees.first() else {
        return Err(Error::Invalid("no trees".into()));
    };
    if trees.iter().any(|t| t.taxa() != first.taxa()) {
        return Err(Error::TaxonMismatch);
    }
    if first.taxon_count() < 3 {
        return Err(Error::Invalid("at least three taxa are needed".into()));
    }
    let inner = Limits { hn_taxa: limits.ruhn_taxa, ..limits.clone() };
    for k in 0..=k_max {
        let (kernel, log) = kernelize_ruhn(trees, k)?;
        match kernel.decided {
            Some(false) => continue,
            Some(true) => {
                let mut single = RootedNetwork::new();
                single.add_leaf(&kernel.trees[0].taxa()[0]);
                return solution_from(lift_network(&single, &log)?, trees).map(Some);
            }
            None => {}
        }
        guard("kernel taxa", kernel.trees[0].taxon_count(), limits.ruhn_taxa)?;
        let edge_lists: Vec<Vec<EdgeId>> = kernel.trees.iter().map(|t| t.edge_ids()).collect();
        let combos: Vec<Vec<EdgeId>> = edge_lists.iter().cloned().multi_cartesian_product().collect();
        let found = combos.par_iter().map(|combo| -> Result<Option<RootedNetwork>> {
            let rooted = kernel
                .trees
                .iter()
                .zip(combo)
                .map(|(t, &e)| root_at_edge(t, e))
                .collect::<Result<Vec<_>>>()?;
            Ok(hn_exact(&rooted, k, &inner)?.map(|s| s.network))
        });
        let hit = found.find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
        match hit {
            Some(Ok(Some(net))) => return solution_from(lift_network(&net, &log)?, trees).map(Some),
            Some(Err(e)) => return Err(e),
            _ => {}
        }
    }
    Ok(None)
}
