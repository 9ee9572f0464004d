use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeId, NodeId, Taxon};
use crate::error::{Error, Result};

/// Undirected multigraph with leaf labels.
///
/// Node and edge ids are stable until [`UnrootedNetwork::compact`] is called;
/// removed slots stay vacant. Parallel edges and loops are representable so
/// that intermediate states of branching and reduction stay well-defined.
#[derive(Clone, Debug, Default)]
pub struct UnrootedNetwork {
    alive: Vec<bool>,
    labels: Vec<Option<Taxon>>,
    adj: Vec<Vec<EdgeId>>,
    edges: Vec<Option<(NodeId, NodeId)>>,
    index: BTreeMap<Taxon, NodeId>,
    live_nodes: usize,
    live_edges: usize,
}

/// Edge bookkeeping emitted by [`UnrootedNetwork::tidy_tracked`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TidyEvent {
    Removed(EdgeId),
    /// A degree-2 node was suppressed; `into` replaces the two edges.
    Merged { from: [EdgeId; 2], into: EdgeId },
}

/// Trees are the reticulation-free special case and share the representation.
pub type UnrootedTree = UnrootedNetwork;

impl UnrootedNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self) -> NodeId {
        self.alive.push(true);
        self.labels.push(None);
        self.adj.push(Vec::new());
        self.live_nodes += 1;
        self.alive.len() - 1
    }

    /// Adds a labelled node. Panics if the taxon is already present.
    pub fn add_leaf(&mut self, taxon: &str) -> NodeId {
        let v = self.add_node();
        self.set_label(v, Some(taxon.to_string()));
        v
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> EdgeId {
        assert!(self.is_node(u) && self.is_node(v), "edge endpoint is not a node");
        let e = self.edges.len();
        self.edges.push(Some((u, v)));
        self.adj[u].push(e);
        self.adj[v].push(e);
        self.live_edges += 1;
        e
    }

    pub fn remove_edge(&mut self, e: EdgeId) {
        let (u, v) = self.edges[e].take().expect("edge already removed");
        remove_one(&mut self.adj[u], e);
        if u != v {
            remove_one(&mut self.adj[v], e);
        } else {
            remove_one(&mut self.adj[u], e);
        }
        self.live_edges -= 1;
    }

    pub fn remove_node(&mut self, v: NodeId) {
        let incident: BTreeSet<EdgeId> = self.adj[v].iter().copied().collect();
        for e in incident {
            self.remove_edge(e);
        }
        self.set_label(v, None);
        self.alive[v] = false;
        self.live_nodes -= 1;
    }

    pub fn set_label(&mut self, v: NodeId, label: Option<Taxon>) {
        if let Some(old) = self.labels[v].take() {
            self.index.remove(&old);
        }
        if let Some(t) = label {
            let prev = self.index.insert(t.clone(), v);
            assert!(prev.is_none(), "duplicate taxon {t}");
            self.labels[v] = Some(t);
        }
    }

    pub fn is_node(&self, v: NodeId) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn is_edge(&self, e: EdgeId) -> bool {
        e < self.edges.len() && self.edges[e].is_some()
    }

    pub fn label(&self, v: NodeId) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn leaf(&self, taxon: &str) -> Option<NodeId> {
        self.index.get(taxon).copied()
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e].expect("edge removed")
    }

    pub fn other_end(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    /// Incident edge ids; a loop appears twice.
    pub fn incident(&self, v: NodeId) -> &[EdgeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(move |&e| self.other_end(e, v))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, NodeId, NodeId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(e, x)| x.map(|(u, v)| (e, u, v)))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges().map(|(e, _, _)| e).collect()
    }

    pub fn node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// Sorted taxon names.
    pub fn taxa(&self) -> Vec<Taxon> {
        self.index.keys().cloned().collect()
    }

    pub fn taxon_count(&self) -> usize {
        self.index.len()
    }

    pub fn taxon_index(&self) -> &BTreeMap<Taxon, NodeId> {
        &self.index
    }

    /// `|E| - (|V| - 1)`, saturating at zero for forests.
    pub fn reticulation_number(&self) -> usize {
        (self.live_edges + 1).saturating_sub(self.live_nodes)
    }

    pub fn is_tree(&self) -> bool {
        self.reticulation_number() == 0 && self.is_connected()
    }

    /// Edge between `u` and `v`, if any.
    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adj[u]
            .iter()
            .copied()
            .find(|&e| self.other_end(e, u) == v)
    }

    /// Replaces edge `e` by a path through a new node, which is returned.
    pub fn subdivide(&mut self, e: EdgeId) -> NodeId {
        let (u, v) = self.endpoints(e);
        self.remove_edge(e);
        let w = self.add_node();
        self.add_edge(u, w);
        self.add_edge(w, v);
        w
    }

    /// Replaces degree-2 node `v` (neighbours `a`, `b`) by an edge `a–b`.
    pub fn suppress(&mut self, v: NodeId) -> EdgeId {
        assert_eq!(self.degree(v), 2);
        let es = self.adj[v].clone();
        let a = self.other_end(es[0], v);
        let b = self.other_end(es[1], v);
        self.remove_node(v);
        self.add_edge(a, b)
    }

    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for s in self.nodes() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Nodes reachable from `start` without crossing edge `skip`.
    pub fn side_of(&self, start: NodeId, skip: EdgeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                if e == skip {
                    continue;
                }
                let w = self.other_end(e, u);
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Cut edges, computed per edge id so parallel edges are never bridges.
    pub fn bridges(&self) -> Vec<EdgeId> {
        let n = self.alive.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut out = Vec::new();
        for s in self.nodes() {
            if disc[s] != usize::MAX {
                continue;
            }
            // iterative DFS: (node, parent edge, next incident index)
            let mut stack: Vec<(NodeId, Option<EdgeId>, usize)> = vec![(s, None, 0)];
            disc[s] = timer;
            low[s] = timer;
            timer += 1;
            while let Some(top) = stack.last_mut() {
                let (u, pe, i) = *top;
                if i < self.adj[u].len() {
                    top.2 += 1;
                    let e = self.adj[u][i];
                    if Some(e) == pe {
                        continue;
                    }
                    let w = self.other_end(e, u);
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(e), 0));
                    } else {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] > disc[p] {
                            out.push(pe.unwrap());
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Normalizes the multigraph and removes unlabelled clutter until stable:
    /// loops and duplicate parallel edges are deleted, unlabelled nodes of
    /// degree at most 1 are deleted and unlabelled degree-2 nodes are
    /// suppressed. Labelled nodes are never removed.
    pub fn tidy(&mut self) {
        self.tidy_tracked(&mut |_| {});
    }

    /// [`Self::tidy`] reporting every edge it removes or merges.
    pub fn tidy_tracked(&mut self, on: &mut dyn FnMut(TidyEvent)) {
        loop {
            let mut changed = false;
            for (e, u, v) in self.edges().collect::<Vec<_>>() {
                if !self.is_edge(e) {
                    continue;
                }
                let redundant = u == v
                    || self.adj[u]
                        .iter()
                        .any(|&f| f < e && self.other_end(f, u) == v);
                if redundant {
                    self.remove_edge(e);
                    on(TidyEvent::Removed(e));
                    changed = true;
                }
            }
            for v in self.nodes().collect::<Vec<_>>() {
                if !self.is_node(v) || self.labels[v].is_some() {
                    continue;
                }
                match self.degree(v) {
                    0 | 1 => {
                        for e in self.adj[v].clone() {
                            on(TidyEvent::Removed(e));
                        }
                        self.remove_node(v);
                        changed = true;
                    }
                    2 => {
                        let (a, b) = (self.adj[v][0], self.adj[v][1]);
                        if a != b {
                            let into = self.suppress(v);
                            on(TidyEvent::Merged { from: [a, b], into });
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Removes the leaf for `taxon` and tidies.
    pub fn delete_taxon(&mut self, taxon: &str) {
        if let Some(v) = self.leaf(taxon) {
            self.remove_node(v);
            self.tidy();
        }
    }

    /// Copy with dense ids; node order and edge order are preserved.
    pub fn compact(&self) -> Self {
        let mut map = vec![usize::MAX; self.alive.len()];
        let mut out = Self::new();
        for v in self.nodes() {
            map[v] = out.add_node();
            if let Some(t) = &self.labels[v] {
                out.set_label(map[v], Some(t.clone()));
            }
        }
        for (_, u, v) in self.edges() {
            out.add_edge(map[u], map[v]);
        }
        out
    }

    /// Structural validity of a finished unrooted phylogenetic network.
    pub fn validate(&self) -> Result<()> {
        if self.live_nodes == 0 {
            return Err(Error::Invalid("empty network".into()));
        }
        if !self.is_connected() {
            return Err(Error::Invalid("network is disconnected".into()));
        }
        for t in self.index.keys() {
            super::check_taxon_name(t)?;
        }
        if self.live_nodes == 1 {
            return match self.nodes().next().and_then(|v| self.label(v)) {
                Some(_) if self.live_edges == 0 => Ok(()),
                _ => Err(Error::Invalid("single node must be a labelled leaf".into())),
            };
        }
        for (e, u, v) in self.edges() {
            if u == v {
                return Err(Error::Invalid(format!("loop at edge {e}")));
            }
            if self.adj[u]
                .iter()
                .any(|&f| f != e && self.other_end(f, u) == v)
            {
                return Err(Error::Invalid("parallel edges".into()));
            }
        }
        for v in self.nodes() {
            let d = self.degree(v);
            match self.label(v) {
                Some(t) if d != 1 => {
                    return Err(Error::Invalid(format!("taxon {t} has degree {d}")))
                }
                None if d != 3 => {
                    return Err(Error::Invalid(format!(
                        "unlabelled node has degree {d}, expected 3"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The node adjacent to a leaf.
    pub fn parent_of_leaf(&self, taxon: &str) -> Option<NodeId> {
        let v = self.leaf(taxon)?;
        (self.degree(v) == 1).then(|| self.other_end(self.adj[v][0], v))
    }

    /// Sorted `(u, v)` node pairs of all edges, by label where available.
    pub fn edge_list(&self) -> Vec<(NodeId, NodeId)> {
        let mut v: Vec<_> = self
            .edges()
            .map(|(_, a, b)| (a.min(b), a.max(b)))
            .collect();
        v.sort_unstable();
        v
    }
}

fn remove_one(v: &mut Vec<EdgeId>, e: EdgeId) {
    let i = v.iter().position(|&x| x == e).expect("incidence missing");
    v.swap_remove(i);
}
