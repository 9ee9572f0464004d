//! Reduction rules (common pendant subtrees, common chains, network chains)
//! and the two kernelization drivers, with a replayable log.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    canonical_rooted, canonical_unrooted, side_taxa, EdgeId, NodeId, RootedTree, Taxon,
    UnrootedNetwork, UnrootedTree, RESERVED_PREFIX,
};
use crate::newick::{parse_rooted_tree, write_rooted_tree};

// ---------------------------------------------------------------------------
// Pendant subtrees

/// A common pendant subtree: a taxon set that hangs off a bridge in every
/// structure with the same shape when rooted at the attachment point.
#[derive(Clone, Debug)]
pub struct PendantSubtree {
    pub taxa: Vec<Taxon>,
    /// Per structure: the detaching edge and its endpoint on the subtree side.
    pub attachments: Vec<(EdgeId, NodeId)>,
    pub shape: RootedTree,
    /// All structures are the same tree; the whole tree collapses.
    pub whole: bool,
}

struct Side {
    edge: EdgeId,
    near: NodeId,
    taxa: Vec<Taxon>,
    shape: String,
}

/// Rooted tree hanging from `near` on the far side of `e` from the rest.
fn rooted_side(n: &UnrootedNetwork, near: NodeId, e: EdgeId) -> RootedTree {
    let mut out = RootedTree::new();
    let mut stack = vec![(near, e, None::<NodeId>)];
    while let Some((v, via, parent)) = stack.pop() {
        let w = match n.label(v) {
            Some(l) => out.add_leaf(l),
            None => out.add_node(),
        };
        if let Some(p) = parent {
            out.add_edge(p, w);
        }
        for &f in n.incident(v) {
            if f != via {
                stack.push((n.other_end(f, v), f, Some(w)));
            }
        }
    }
    out
}

/// Tree-shaped sides of bridges with at least two and fewer than all taxa.
fn pendant_sides(n: &UnrootedNetwork) -> Vec<Side> {
    let total = n.taxon_count();
    let mut out = Vec::new();
    for e in n.bridges() {
        let (a, b) = n.endpoints(e);
        for near in [a, b] {
            let nodes = n.side_of(near, e);
            let degree_sum: usize = nodes.iter().map(|&v| n.degree(v)).sum();
            if degree_sum - 1 != 2 * (nodes.len() - 1) {
                continue;
            }
            let taxa: Vec<Taxon> = nodes.iter().filter_map(|&v| n.label(v).map(String::from)).collect();
            if taxa.len() < 2 || taxa.len() >= total {
                continue;
            }
            let mut taxa = taxa;
            taxa.sort();
            let shape = canonical_rooted(&rooted_side(n, near, e));
            out.push(Side { edge: e, near, taxa, shape });
        }
    }
    out
}

fn same_taxa(s: &[UnrootedNetwork]) -> Result<Vec<Taxon>> {
    let first = s.first().ok_or_else(|| Error::Invalid("no structures given".into()))?.taxa();
    if s.iter().any(|n| n.taxa() != first) {
        return Err(Error::TaxonMismatch);
    }
    Ok(first)
}

/// A maximal common pendant subtree with at least two taxa, if any. Among
/// maximal candidates the one with the smallest taxon wins.
pub fn find_common_pendant_subtree(s: &[UnrootedNetwork]) -> Result<Option<PendantSubtree>> {
    let taxa = same_taxa(s)?;
    if taxa.len() >= 2 && s.iter().all(|n| n.is_tree()) {
        let c = canonical_unrooted(&s[0]);
        if s.iter().all(|n| canonical_unrooted(n) == c) {
            let t = &s[0];
            let leaf = t.leaf(&taxa[0]).unwrap();
            let shape = crate::model::root_at_edge(t, t.incident(leaf)[0])?;
            return Ok(Some(PendantSubtree { taxa, attachments: Vec::new(), shape, whole: true }));
        }
    }
    let per: Vec<BTreeMap<Vec<Taxon>, Side>> = s
        .iter()
        .map(|n| pendant_sides(n).into_iter().map(|sd| (sd.taxa.clone(), sd)).collect())
        .collect();
    let mut common: Vec<&Vec<Taxon>> = per[0]
        .iter()
        .filter(|(k, sd)| per[1..].iter().all(|m| m.get(*k).is_some_and(|o| o.shape == sd.shape)))
        .map(|(k, _)| k)
        .collect();
    let is_sub = |a: &Vec<Taxon>, b: &Vec<Taxon>| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
    let snapshot = common.clone();
    common.retain(|a| !snapshot.iter().any(|b| is_sub(a, b)));
    common.sort_by(|a, b| a[0].cmp(&b[0]).then_with(|| a.cmp(b)));
    let Some(best) = common.first() else { return Ok(None) };
    let sd = &per[0][*best];
    let shape = rooted_side(&s[0], sd.near, sd.edge);
    let attachments = per.iter().map(|m| (m[*best].edge, m[*best].near)).collect();
    Ok(Some(PendantSubtree { taxa: (*best).clone(), attachments, shape, whole: false }))
}

/// Whether some bridge of `n` detaches a tree on at least two taxa (and not all).
pub fn has_pendant_subtree(n: &UnrootedNetwork) -> bool {
    !pendant_sides(n).is_empty()
}

/// A taxon name in the reserved namespace not used by `taxa`.
pub fn fresh_taxon(taxa: &[Taxon], counter: &mut usize) -> Taxon {
    loop {
        let name = format!("{RESERVED_PREFIX}x{counter}");
        *counter += 1;
        if !taxa.contains(&name) {
            return name;
        }
    }
}

/// Clips the subtree from every structure and puts leaf `fresh` in its place.
pub fn apply_cps(s: &[UnrootedNetwork], p: &PendantSubtree, fresh: &str) -> (Vec<UnrootedNetwork>, Step) {
    let out = s
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if p.whole {
                let mut t = UnrootedNetwork::new();
                t.add_leaf(fresh);
                return t;
            }
            let (e, near) = p.attachments[i];
            let mut m = n.clone();
            for v in n.side_of(near, e) {
                if v != near {
                    m.remove_node(v);
                }
            }
            m.set_label(near, Some(fresh.to_string()));
            m.compact()
        })
        .collect();
    let step = Step::Cps { fresh: fresh.to_string(), taxa: p.taxa.clone(), shape: p.shape.clone() };
    (out, step)
}

// ---------------------------------------------------------------------------
// Chains

/// A chain: taxa whose parents form a path, with the parents per structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub taxa: Vec<Taxon>,
    pub parents: Vec<Vec<NodeId>>,
}

fn leaf_parent(n: &UnrootedNetwork, x: &str) -> Option<NodeId> {
    n.parent_of_leaf(x).filter(|&p| n.label(p).is_none())
}

/// Whether appending a taxon with parent `p` keeps `parents` a chain.
fn extends(n: &UnrootedNetwork, parents: &[NodeId], p: NodeId) -> bool {
    let t = parents.len();
    if t == 0 {
        return true;
    }
    let last = parents[t - 1];
    if t >= 3 && parents[t - 2] == last {
        return false;
    }
    if p == last {
        return t == 1 || parents[t - 2] != last;
    }
    n.edge_between(last, p).is_some() && !parents.contains(&p)
}

/// Parents of `seq` if it is a chain of `n`.
pub fn chain_parents(n: &UnrootedNetwork, seq: &[Taxon]) -> Option<Vec<NodeId>> {
    let mut parents = Vec::with_capacity(seq.len());
    for (i, x) in seq.iter().enumerate() {
        if seq[..i].contains(x) {
            return None;
        }
        let p = leaf_parent(n, x)?;
        if !extends(n, &parents, p) {
            return None;
        }
        parents.push(p);
    }
    Some(parents)
}

/// Whether `seq` or its reverse is a chain of `n`.
pub fn is_chain(n: &UnrootedNetwork, seq: &[Taxon]) -> bool {
    let rev: Vec<Taxon> = seq.iter().rev().cloned().collect();
    chain_parents(n, seq).is_some() || chain_parents(n, &rev).is_some()
}

fn extension_candidates(n: &UnrootedNetwork, last: NodeId) -> Vec<Taxon> {
    let mut out = BTreeSet::new();
    let mut around = vec![last];
    around.extend(n.neighbors(last));
    for w in around {
        if n.label(w).is_some() {
            continue;
        }
        for z in n.neighbors(w) {
            if let Some(l) = n.label(z) {
                out.insert(l.to_string());
            }
        }
    }
    out.into_iter().collect()
}

fn common_extensions(s: &[UnrootedNetwork], seq: &[Taxon], parents: &[Vec<NodeId>]) -> Vec<(Taxon, Vec<NodeId>)> {
    let last = *parents[0].last().unwrap();
    let mut out = Vec::new();
    for y in extension_candidates(&s[0], last) {
        if seq.contains(&y) {
            continue;
        }
        let mut ps = Vec::with_capacity(s.len());
        for (i, n) in s.iter().enumerate() {
            match leaf_parent(n, &y) {
                Some(p) if extends(n, &parents[i], p) => ps.push(p),
                _ => break,
            }
        }
        if ps.len() == s.len() {
            out.push((y, ps));
        }
    }
    out
}

fn orient(mut seq: Vec<Taxon>) -> Vec<Taxon> {
    if seq.first() > seq.last() {
        seq.reverse();
    }
    seq
}

/// All maximal common chains (length at least 2), canonically oriented and
/// sorted by smallest taxon, then lexicographically.
pub fn maximal_common_chains(s: &[UnrootedNetwork]) -> Result<Vec<Vec<Taxon>>> {
    let taxa = same_taxa(s)?;
    let mut found: BTreeSet<Vec<Taxon>> = BTreeSet::new();
    let mut dead_ends: Vec<Vec<Taxon>> = Vec::new();
    for x in &taxa {
        let Some(ps) = s.iter().map(|n| leaf_parent(n, x)).collect::<Option<Vec<_>>>() else { continue };
        let mut stack = vec![(vec![x.clone()], ps.into_iter().map(|p| vec![p]).collect::<Vec<_>>())];
        while let Some((seq, parents)) = stack.pop() {
            let ext = common_extensions(s, &seq, &parents);
            if ext.is_empty() && seq.len() >= 2 {
                dead_ends.push(seq.clone());
            }
            for (y, ps) in ext {
                let mut seq2 = seq.clone();
                seq2.push(y);
                let parents2 = parents.iter().zip(ps).map(|(pp, p)| {
                    let mut v = pp.clone();
                    v.push(p);
                    v
                }).collect();
                stack.push((seq2, parents2));
            }
        }
    }
    let dead: BTreeSet<Vec<Taxon>> = dead_ends.iter().cloned().collect();
    for seq in dead_ends {
        let rev: Vec<Taxon> = seq.iter().rev().cloned().collect();
        if dead.contains(&rev) {
            found.insert(orient(seq));
        }
    }
    let mut v: Vec<Vec<Taxon>> = found.into_iter().collect();
    v.sort_by(|a, b| {
        let ma = a.iter().min().unwrap();
        let mb = b.iter().min().unwrap();
        ma.cmp(mb).then_with(|| a.cmp(b))
    });
    Ok(v)
}

/// The preferred maximal common chain longer than `d`.
pub fn find_common_chain(s: &[UnrootedNetwork], d: usize) -> Result<Option<Chain>> {
    let chains = maximal_common_chains(s)?;
    Ok(chains.into_iter().find(|c| c.len() > d).map(|taxa| {
        let parents = s.iter().map(|n| chain_parents(n, &taxa).expect("common chain")).collect();
        Chain { taxa, parents }
    }))
}

/// Truncates the preferred maximal common chain longer than `d` to its first
/// `d` taxa in every structure.
pub fn apply_dcc(s: &[UnrootedNetwork], d: usize) -> Result<(Vec<UnrootedNetwork>, Step)> {
    let chain = find_common_chain(s, d)?.ok_or(Error::NoChain(d))?;
    Ok((truncate_chain(s, &chain.taxa, d), Step::Cc { d, chain: chain.taxa }))
}

/// Truncates a given common chain to its first `d` taxa.
pub fn apply_dcc_on(s: &[UnrootedNetwork], chain: &[Taxon], d: usize) -> Result<(Vec<UnrootedNetwork>, Step)> {
    if chain.len() <= d {
        return Err(Error::NoChain(d));
    }
    if s.iter().any(|n| chain_parents(n, chain).is_none()) {
        return Err(Error::Invalid(format!("{} is not a common chain", chain.join(","))));
    }
    Ok((truncate_chain(s, chain, d), Step::Cc { d, chain: chain.to_vec() }))
}

fn truncate_chain(s: &[UnrootedNetwork], chain: &[Taxon], d: usize) -> Vec<UnrootedNetwork> {
    s.iter()
        .map(|n| {
            let mut m = n.clone();
            for x in &chain[d..] {
                m.delete_taxon(x);
            }
            m.compact()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Network chains

/// Edge chosen or action taken by the network chain rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NcAction {
    /// `e1`, `e12`, ..., `et` as named by the rule.
    DeleteEdge(String),
    DeleteTaxon(Taxon),
    /// The instance is a NO instance.
    No,
}

#[allow(clippy::large_enum_variant)]
pub enum NcOutcome {
    Applied(UnrootedNetwork, UnrootedTree, Step),
    No(Step),
    NotApplicable,
}

fn tree_has_pendant(t: &UnrootedTree, set: &[&Taxon]) -> bool {
    let want: BTreeSet<&str> = set.iter().map(|s| s.as_str()).collect();
    t.edges().any(|(e, a, _)| {
        let side = side_taxa(t, e, a);
        let other: BTreeSet<Taxon> = t.taxa().into_iter().filter(|x| !side.contains(x)).collect();
        [side, other].iter().any(|s| s.len() == want.len() && s.iter().all(|x| want.contains(x.as_str())))
    })
}

/// Network chain rule on the preferred maximal network chain of length >= 3.
pub fn apply_nc(n: &UnrootedNetwork, t: &UnrootedTree) -> Result<NcOutcome> {
    let chains = maximal_common_chains(std::slice::from_ref(n))?;
    match chains.into_iter().find(|c| c.len() >= 3) {
        Some(c) => apply_nc_on(n, t, &c),
        None => Ok(NcOutcome::NotApplicable),
    }
}

/// Network chain rule on a given chain of the network.
pub fn apply_nc_on(n: &UnrootedNetwork, t: &UnrootedTree, chain: &[Taxon]) -> Result<NcOutcome> {
    let len = chain.len();
    let p = chain_parents(n, chain).ok_or_else(|| Error::Invalid("not a chain of the network".into()))?;
    if len < 3 {
        return Ok(NcOutcome::NotApplicable);
    }
    if p.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invalid("network chain parents must be distinct".into()));
    }
    let x = |i: usize| &chain[i - 1];
    let has_chain = |idx: &[usize]| {
        let seq: Vec<Taxon> = idx.iter().map(|&i| x(i).clone()).collect();
        is_chain(t, &seq)
    };
    let (case, action) = if len >= 7 {
        (1, NcAction::No)
    } else if len == 6 {
        (2, NcAction::DeleteEdge("e34".into()))
    } else if len == 5 {
        if has_chain(&[1, 2, 3]) {
            (3, NcAction::DeleteEdge("e34".into()))
        } else {
            (3, NcAction::DeleteEdge("e23".into()))
        }
    } else if len == 4 {
        if has_chain(&[1, 2, 3]) {
            (4, NcAction::DeleteEdge("e34".into()))
        } else if has_chain(&[2, 3, 4]) {
            (4, NcAction::DeleteEdge("e12".into()))
        } else {
            (4, NcAction::DeleteEdge("e23".into()))
        }
    } else if tree_has_pendant(t, &[x(1), x(2), x(3)]) {
        let same = t.parent_of_leaf(x(1)).is_some() && t.parent_of_leaf(x(1)) == t.parent_of_leaf(x(2));
        (5, NcAction::DeleteEdge(if same { "e1" } else { "et" }.into()))
    } else if tree_has_pendant(t, &[x(1), x(2)]) {
        (6, NcAction::DeleteEdge("e23".into()))
    } else if tree_has_pendant(t, &[x(2), x(3)]) {
        (7, NcAction::DeleteEdge("e12".into()))
    } else if has_chain(&[1, 2, 3]) {
        (8, NcAction::DeleteTaxon(x(3).clone()))
    } else {
        // the chain is neither a tree chain nor split into pendant chains
        (0, NcAction::No)
    };
    let step = Step::Nc { case, chain: chain.to_vec(), action: action.clone() };
    match action {
        NcAction::No => Ok(NcOutcome::No(step)),
        NcAction::DeleteTaxon(y) => {
            let mut n2 = n.clone();
            n2.delete_taxon(&y);
            let mut t2 = t.clone();
            t2.delete_taxon(&y);
            Ok(NcOutcome::Applied(n2.compact(), t2.compact(), step))
        }
        NcAction::DeleteEdge(name) => {
            let e = nc_edge(n, chain, &p, &name)?;
            let mut n2 = n.clone();
            n2.remove_edge(e);
            if !drop_taxon_free(&mut n2) {
                return Ok(NcOutcome::No(step));
            }
            n2.tidy();
            Ok(NcOutcome::Applied(n2.compact(), t.clone(), step))
        }
    }
}

/// Resolves an edge name of the network chain rule to an edge id.
fn nc_edge(n: &UnrootedNetwork, chain: &[Taxon], p: &[NodeId], name: &str) -> Result<EdgeId> {
    let t = chain.len();
    let outer = |i: usize, inner: usize| {
        let leaf = n.leaf(&chain[i]).unwrap();
        let e_in = n.edge_between(p[i], p[inner]).unwrap();
        n.incident(p[i])
            .iter()
            .copied()
            .find(|&e| e != e_in && n.other_end(e, p[i]) != leaf)
            .ok_or_else(|| Error::Invalid("chain end has no outer edge".into()))
    };
    match name {
        "e1" => outer(0, 1),
        "et" => outer(t - 1, t - 2),
        _ => {
            let digits = name.strip_prefix('e').unwrap_or("");
            let (a, b) = digits.split_at(digits.len() / 2);
            let (a, b): (usize, usize) = (
                a.parse().map_err(|_| Error::Invalid(format!("bad edge name {name}")))?,
                b.parse().map_err(|_| Error::Invalid(format!("bad edge name {name}")))?,
            );
            n.edge_between(p[a - 1], p[b - 1])
                .ok_or_else(|| Error::Invalid(format!("no edge {name}")))
        }
    }
}

/// Removes taxon-free components. Returns false if the taxa became separated.
fn drop_taxon_free(n: &mut UnrootedNetwork) -> bool {
    let mut with_taxa = 0;
    for c in n.components() {
        if c.iter().any(|&v| n.label(v).is_some()) {
            with_taxa += 1;
        } else {
            for v in c {
                n.remove_node(v);
            }
        }
    }
    with_taxa <= 1
}

/// Deletes taxon-free parts hanging off bridges; returns the number of
/// edges removed.
pub fn prune_taxon_free(n: &mut UnrootedNetwork) -> usize {
    let before = n.edge_count();
    loop {
        let mut cut = None;
        for e in n.bridges() {
            let (a, b) = n.endpoints(e);
            for near in [a, b] {
                let side = n.side_of(near, e);
                if side.iter().all(|&v| n.label(v).is_none()) {
                    cut = Some(side);
                    break;
                }
            }
            if cut.is_some() {
                break;
            }
        }
        match cut {
            Some(side) => {
                for v in side {
                    n.remove_node(v);
                }
                n.tidy();
            }
            None => break,
        }
    }
    before - n.edge_count()
}

// ---------------------------------------------------------------------------
// Log

/// One reduction step.
#[derive(Clone, Debug)]
pub enum Step {
    Prune { edges: usize },
    Cps { fresh: Taxon, taxa: Vec<Taxon>, shape: RootedTree },
    Cc { d: usize, chain: Vec<Taxon> },
    Nc { case: u8, chain: Vec<Taxon>, action: NcAction },
    Trivial(bool),
}

impl PartialEq for Step {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Prune { edges } => write!(f, "prune {edges}"),
            Step::Cps { fresh, taxa, shape } => {
                write!(f, "cps {fresh} {} {}", taxa.join(","), write_rooted_tree(shape))
            }
            Step::Cc { d, chain } => write!(f, "cc {d} {}", chain.join(",")),
            Step::Nc { case, chain, action } => {
                write!(f, "nc {case} {} ", chain.join(","))?;
                match action {
                    NcAction::DeleteEdge(e) => write!(f, "delete-edge {e}"),
                    NcAction::DeleteTaxon(x) => write!(f, "delete-taxon {x}"),
                    NcAction::No => write!(f, "no"),
                }
            }
            Step::Trivial(yes) => write!(f, "trivial {}", if *yes { "YES" } else { "NO" }),
        }
    }
}

fn bad(line: &str) -> Error {
    Error::Parse { pos: 0, msg: format!("bad log line: {line}") }
}

impl FromStr for Step {
    type Err = Error;
    fn from_str(line: &str) -> Result<Step> {
        let w: Vec<&str> = line.split_whitespace().collect();
        let list = |s: &str| s.split(',').map(String::from).collect::<Vec<_>>();
        match w.as_slice() {
            ["prune", n] => Ok(Step::Prune { edges: n.parse().map_err(|_| bad(line))? }),
            ["cps", fresh, taxa, shape] => Ok(Step::Cps {
                fresh: fresh.to_string(),
                taxa: list(taxa),
                shape: parse_rooted_tree(shape)?,
            }),
            ["cc", d, chain] => Ok(Step::Cc { d: d.parse().map_err(|_| bad(line))?, chain: list(chain) }),
            ["nc", case, chain, rest @ ..] => {
                let action = match rest {
                    ["delete-edge", e] => NcAction::DeleteEdge(e.to_string()),
                    ["delete-taxon", x] => NcAction::DeleteTaxon(x.to_string()),
                    ["no"] => NcAction::No,
                    _ => return Err(bad(line)),
                };
                Ok(Step::Nc { case: case.parse().map_err(|_| bad(line))?, chain: list(chain), action })
            }
            ["trivial", "YES"] => Ok(Step::Trivial(true)),
            ["trivial", "NO"] => Ok(Step::Trivial(false)),
            _ => Err(bad(line)),
        }
    }
}

/// Ordered reduction steps; serializes one step per line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReductionLog {
    pub steps: Vec<Step>,
}

impl fmt::Display for ReductionLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for ReductionLog {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let steps = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(ReductionLog { steps })
    }
}

impl ReductionLog {
    /// Re-derives the reduced structures from the originals. For tree
    /// containment logs the structures are `[network, tree]`. Returns the
    /// structures and the verdict if the log ends in a decision.
    pub fn replay(&self, s: &[UnrootedNetwork]) -> Result<(Vec<UnrootedNetwork>, Option<bool>)> {
        let mut cur: Vec<UnrootedNetwork> = s.to_vec();
        for step in &self.steps {
            match step {
                Step::Prune { .. } => {
                    for n in cur.iter_mut() {
                        prune_taxon_free(n);
                        *n = n.compact();
                    }
                }
                Step::Cps { fresh, taxa, .. } => {
                    let p = find_common_pendant_subtree(&cur)?
                        .filter(|p| &p.taxa == taxa)
                        .ok_or_else(|| Error::Invalid(format!("replay: no pendant subtree {}", taxa.join(","))))?;
                    cur = apply_cps(&cur, &p, fresh).0;
                }
                Step::Cc { d, chain } => cur = truncate_chain(&cur, chain, *d),
                Step::Nc { chain, .. } => match apply_nc_on(&cur[0], &cur[1], chain)? {
                    NcOutcome::Applied(n, t, _) => cur = vec![n, t],
                    NcOutcome::No(_) => return Ok((cur, Some(false))),
                    NcOutcome::NotApplicable => return Err(Error::Invalid("replay: rule not applicable".into())),
                },
                Step::Trivial(v) => return Ok((cur, Some(*v))),
            }
        }
        Ok((cur, None))
    }
}

// ---------------------------------------------------------------------------
// Drivers

/// Result of tree containment kernelization.
#[derive(Clone, Debug)]
pub struct UtcKernel {
    pub network: UnrootedNetwork,
    pub tree: UnrootedTree,
    /// Set when the answer was found during reduction; the instance is then
    /// the trivial four-taxon instance with that answer.
    pub decided: Option<bool>,
}

/// Four-taxon instance with the given answer: `ab|cd` against `ab|cd` or `ac|bd`.
pub fn trivial_instance(yes: bool) -> (UnrootedNetwork, UnrootedTree) {
    let n = crate::newick::parse_unrooted_tree("((a,b),c,d);").unwrap();
    let t = if yes { n.clone() } else { crate::newick::parse_unrooted_tree("((a,c),b,d);").unwrap() };
    (n, t)
}

fn decided(yes: bool, log: &mut ReductionLog) -> UtcKernel {
    log.steps.push(Step::Trivial(yes));
    let (network, tree) = trivial_instance(yes);
    UtcKernel { network, tree, decided: Some(yes) }
}

/// Tree containment kernel: prune taxon-free parts, then common pendant
/// subtrees, common 3-chains and network chains, repeated until none applies.
pub fn kernelize_utc(n: &UnrootedNetwork, t: &UnrootedTree) -> Result<(UtcKernel, ReductionLog)> {
    let mut log = ReductionLog::default();
    if n.taxa() != t.taxa() {
        return Err(Error::TaxonMismatch);
    }
    let mut net = n.clone();
    net.tidy();
    let mut tree = t.clone();
    let mut counter = 0;
    loop {
        if tree.taxon_count() <= 3 {
            return Ok((decided(true, &mut log), log));
        }
        let pruned = prune_taxon_free(&mut net);
        if pruned > 0 {
            log.steps.push(Step::Prune { edges: pruned });
            net = net.compact();
        }
        if net.is_tree() {
            let yes = canonical_unrooted(&net) == canonical_unrooted(&tree);
            return Ok((decided(yes, &mut log), log));
        }
        let pair = [net.clone(), tree.clone()];
        if let Some(p) = find_common_pendant_subtree(&pair)? {
            let fresh = fresh_taxon(&net.taxa(), &mut counter);
            let (out, step) = apply_cps(&pair, &p, &fresh);
            log.steps.push(step);
            [net, tree] = <[UnrootedNetwork; 2]>::try_from(out).unwrap();
            continue;
        }
        if has_pendant_subtree(&net) {
            return Ok((decided(false, &mut log), log));
        }
        if find_common_chain(&pair, 3)?.is_some() {
            let (out, step) = apply_dcc(&pair, 3)?;
            log.steps.push(step);
            [net, tree] = <[UnrootedNetwork; 2]>::try_from(out).unwrap();
            continue;
        }
        match apply_nc(&net, &tree)? {
            NcOutcome::Applied(n2, t2, step) => {
                log.steps.push(step);
                net = n2;
                tree = t2;
            }
            NcOutcome::No(step) => {
                log.steps.push(step);
                return Ok((decided(false, &mut log), log));
            }
            NcOutcome::NotApplicable => break,
        }
    }
    Ok((UtcKernel { network: net, tree, decided: None }, log))
}

/// Root-uncertain kernel for parameter `k`.
#[derive(Clone, Debug)]
pub struct RuhnKernel {
    pub trees: Vec<UnrootedTree>,
    /// `Some(false)` when the kernel proves the answer is NO at this `k`;
    /// `Some(true)` when all inputs coincide.
    pub decided: Option<bool>,
}

/// Applies common pendant subtree and common `5k`-chain reductions to
/// exhaustion. For `k = 0` no chains are reduced and the answer is whether
/// all trees coincide.
pub fn kernelize_ruhn(s: &[UnrootedTree], k: usize) -> Result<(RuhnKernel, ReductionLog)> {
    same_taxa(s)?;
    let mut log = ReductionLog::default();
    let mut cur: Vec<UnrootedTree> = s.to_vec();
    let mut counter = 0;
    loop {
        if let Some(p) = find_common_pendant_subtree(&cur)? {
            let fresh = fresh_taxon(&cur[0].taxa(), &mut counter);
            let (out, step) = apply_cps(&cur, &p, &fresh);
            log.steps.push(step);
            cur = out;
            continue;
        }
        if k > 0 {
            if let Some(chain) = find_common_chain(&cur, 5 * k)? {
                cur = truncate_chain(&cur, &chain.taxa, 5 * k);
                log.steps.push(Step::Cc { d: 5 * k, chain: chain.taxa });
                continue;
            }
        }
        break;
    }
    let identical = cur[0].taxon_count() == 1;
    let decided = if identical {
        Some(true)
    } else if k == 0 || cur[0].taxon_count() >= 20 * k * k {
        Some(false)
    } else {
        None
    };
    Ok((RuhnKernel { trees: cur, decided }, log))
}
