use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeId, NodeId, Taxon};
use crate::error::{Error, Result};

/// Directed multigraph with leaf labels, used for rooted networks and trees.
#[derive(Clone, Debug, Default)]
pub struct RootedNetwork {
    alive: Vec<bool>,
    labels: Vec<Option<Taxon>>,
    out: Vec<Vec<EdgeId>>,
    inn: Vec<Vec<EdgeId>>,
    edges: Vec<Option<(NodeId, NodeId)>>,
    index: BTreeMap<Taxon, NodeId>,
    live_nodes: usize,
    live_edges: usize,
}

pub type RootedTree = RootedNetwork;

impl RootedNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self) -> NodeId {
        self.alive.push(true);
        self.labels.push(None);
        self.out.push(Vec::new());
        self.inn.push(Vec::new());
        self.live_nodes += 1;
        self.alive.len() - 1
    }

    pub fn add_leaf(&mut self, taxon: &str) -> NodeId {
        let v = self.add_node();
        self.set_label(v, Some(taxon.to_string()));
        v
    }

    pub fn add_edge(&mut self, tail: NodeId, head: NodeId) -> EdgeId {
        assert!(self.is_node(tail) && self.is_node(head));
        let e = self.edges.len();
        self.edges.push(Some((tail, head)));
        self.out[tail].push(e);
        self.inn[head].push(e);
        self.live_edges += 1;
        e
    }

    pub fn remove_edge(&mut self, e: EdgeId) {
        let (u, v) = self.edges[e].take().expect("edge already removed");
        let i = self.out[u].iter().position(|&x| x == e).unwrap();
        self.out[u].remove(i);
        let i = self.inn[v].iter().position(|&x| x == e).unwrap();
        self.inn[v].remove(i);
        self.live_edges -= 1;
    }

    pub fn remove_node(&mut self, v: NodeId) {
        let es: BTreeSet<EdgeId> = self.out[v].iter().chain(&self.inn[v]).copied().collect();
        for e in es {
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

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.inn[v]
    }

    pub fn children(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out[v].iter().map(move |&e| self.endpoints(e).1)
    }

    pub fn parents(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.inn[v].iter().map(move |&e| self.endpoints(e).0)
    }

    pub fn indegree(&self, v: NodeId) -> usize {
        self.inn[v].len()
    }

    pub fn outdegree(&self, v: NodeId) -> usize {
        self.out[v].len()
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

    pub fn node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn taxa(&self) -> Vec<Taxon> {
        self.index.keys().cloned().collect()
    }

    pub fn taxon_index(&self) -> &BTreeMap<Taxon, NodeId> {
        &self.index
    }

    pub fn reticulation_number(&self) -> usize {
        (self.live_edges + 1).saturating_sub(self.live_nodes)
    }

    /// Nodes with indegree at least 2, ascending.
    pub fn reticulations(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.indegree(v) >= 2).collect()
    }

    /// The unique node of indegree 0, if there is exactly one.
    pub fn root(&self) -> Option<NodeId> {
        let mut it = self.nodes().filter(|&v| self.indegree(v) == 0);
        let r = it.next()?;
        it.next().is_none().then_some(r)
    }

    pub fn subdivide(&mut self, e: EdgeId) -> NodeId {
        let (u, v) = self.endpoints(e);
        self.remove_edge(e);
        let w = self.add_node();
        self.add_edge(u, w);
        self.add_edge(w, v);
        w
    }

    /// Topological order, or `None` when a directed cycle exists.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indeg: Vec<usize> = (0..self.alive.len()).map(|v| self.inn[v].len()).collect();
        let mut ready: Vec<NodeId> = self.nodes().filter(|&v| indeg[v] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.live_nodes);
        while let Some(u) = ready.pop() {
            order.push(u);
            for c in self.children(u).collect::<Vec<_>>() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
        (order.len() == self.live_nodes).then_some(order)
    }

    /// Cleans up after edge or leaf deletions, repeating until stable:
    /// reticulations without children are deleted, nodes with one parent and
    /// one child are suppressed, unlabelled leaves are deleted, and a root
    /// with a single child is deleted.
    pub fn tidy(&mut self) {
        loop {
            let mut changed = false;
            for v in self.nodes().collect::<Vec<_>>() {
                if !self.is_node(v) || self.labels[v].is_some() {
                    continue;
                }
                let (i, o) = (self.indegree(v), self.outdegree(v));
                if o == 0 {
                    self.remove_node(v);
                    changed = true;
                } else if i == 1 && o == 1 {
                    let p = self.endpoints(self.inn[v][0]).0;
                    let c = self.endpoints(self.out[v][0]).1;
                    self.remove_node(v);
                    self.add_edge(p, c);
                    changed = true;
                } else if i == 0 && o == 1 {
                    self.remove_node(v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

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

    /// Checks the rooted binary phylogenetic network invariants.
    pub fn validate(&self) -> Result<()> {
        if self.live_nodes == 0 {
            return Err(Error::Invalid("empty network".into()));
        }
        for t in self.index.keys() {
            super::check_taxon_name(t)?;
        }
        if self.topological_order().is_none() {
            return Err(Error::Invalid("network contains a directed cycle".into()));
        }
        let root = self
            .root()
            .ok_or_else(|| Error::Invalid("network must have exactly one root".into()))?;
        if self.live_nodes == 1 {
            return match self.label(root) {
                Some(_) => Ok(()),
                None => Err(Error::Invalid("single node must be a labelled leaf".into())),
            };
        }
        for v in self.nodes() {
            let (i, o) = (self.indegree(v), self.outdegree(v));
            let ok = match self.label(v) {
                Some(_) => i == 1 && o == 0,
                None if v == root => o == 2,
                None => (i == 1 && o == 2) || (i == 2 && o == 1),
            };
            if !ok {
                return Err(Error::Invalid(format!(
                    "node {} has indegree {i} and outdegree {o}",
                    self.label(v).unwrap_or("(unlabelled)")
                )));
            }
        }
        for v in self.nodes() {
            let mut ps: Vec<NodeId> = self.parents(v).collect();
            ps.sort_unstable();
            if ps.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid("parallel edges".into()));
            }
        }
        Ok(())
    }
}
