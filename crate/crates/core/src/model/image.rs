use std::collections::{BTreeMap, BTreeSet};

use super::{
    canonical_rooted, canonical_unrooted, EdgeId, NodeId, RootedNetwork, RootedTree, Taxon,
    UnrootedNetwork, UnrootedTree,
};

/// A subgraph of a host network that tidies to a guest tree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Image {
    pub host_edges: BTreeSet<EdgeId>,
    pub host_nodes: BTreeSet<NodeId>,
    pub leaf_map: BTreeMap<Taxon, NodeId>,
}

impl Image {
    /// Image spanned by `edges` of an unrooted host; all host taxa are mapped.
    pub fn from_unrooted(n: &UnrootedNetwork, edges: BTreeSet<EdgeId>) -> Image {
        let mut host_nodes: BTreeSet<NodeId> = edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = n.endpoints(e);
                [u, v]
            })
            .collect();
        let leaf_map = n.taxon_index().clone();
        host_nodes.extend(leaf_map.values().copied());
        Image { host_edges: edges, host_nodes, leaf_map }
    }

    pub fn from_rooted(n: &RootedNetwork, edges: BTreeSet<EdgeId>) -> Image {
        let mut host_nodes: BTreeSet<NodeId> = edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = n.endpoints(e);
                [u, v]
            })
            .collect();
        let leaf_map = n.taxon_index().clone();
        host_nodes.extend(leaf_map.values().copied());
        Image { host_edges: edges, host_nodes, leaf_map }
    }

    /// The image as a stand-alone graph (host node ids are not preserved).
    pub fn subgraph_unrooted(&self, n: &UnrootedNetwork) -> UnrootedNetwork {
        let mut g = UnrootedNetwork::new();
        let mut map = BTreeMap::new();
        for &v in &self.host_nodes {
            let w = g.add_node();
            if let Some(l) = n.label(v) {
                g.set_label(w, Some(l.to_string()));
            }
            map.insert(v, w);
        }
        for &e in &self.host_edges {
            let (u, v) = n.endpoints(e);
            g.add_edge(map[&u], map[&v]);
        }
        g
    }

    /// Independent check that this is an image of `t` in the unrooted host `n`:
    /// the edges form a tree containing every taxon, and tidying it yields `t`.
    pub fn verifies_unrooted(&self, n: &UnrootedNetwork, t: &UnrootedTree) -> bool {
        if self.host_edges.iter().any(|&e| !n.is_edge(e)) || n.taxa() != t.taxa() {
            return false;
        }
        let mut g = self.subgraph_unrooted(n);
        let is_tree = g.is_connected() && g.edge_count() + 1 == g.node_count();
        if !is_tree {
            return false;
        }
        g.tidy();
        canonical_unrooted(&g) == canonical_unrooted(t)
    }

    /// Rooted analogue: the edges form a tree below a single root that tidies to `t`.
    pub fn verifies_rooted(&self, n: &RootedNetwork, t: &RootedTree) -> bool {
        if self.host_edges.iter().any(|&e| !n.is_edge(e)) || n.taxa() != t.taxa() {
            return false;
        }
        let mut g = RootedNetwork::new();
        let mut map = BTreeMap::new();
        for &v in &self.host_nodes {
            let w = g.add_node();
            if let Some(l) = n.label(v) {
                g.set_label(w, Some(l.to_string()));
            }
            map.insert(v, w);
        }
        for &e in &self.host_edges {
            let (u, v) = n.endpoints(e);
            g.add_edge(map[&u], map[&v]);
        }
        if g.nodes().any(|v| g.indegree(v) > 1) || g.root().is_none() {
            return false;
        }
        if g.edge_count() + 1 != g.node_count() {
            return false;
        }
        g.tidy();
        canonical_rooted(&g) == canonical_rooted(t)
    }
}
