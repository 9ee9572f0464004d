//! Fixed-seed instance families for the benchmarks.

use phylonet::random::{displayed_tree, rooted_tree, taxon_names, unrooted_network, unrooted_tree};
use phylonet::{RootedTree, UnrootedNetwork, UnrootedTree};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Containment instances with `taxa` taxa and `r` reticulations; even
/// indices are YES instances.
pub fn containment(taxa: usize, r: usize, count: usize) -> Vec<(UnrootedNetwork, UnrootedTree)> {
    let mut rng = StdRng::seed_from_u64((taxa * 100 + r) as u64);
    let names = taxon_names(taxa);
    (0..count)
        .map(|i| {
            let n = unrooted_network(&names, r, &mut rng);
            let t = if i % 2 == 0 { displayed_tree(&n, &mut rng) } else { unrooted_tree(&names, &mut rng) };
            (n, t)
        })
        .collect()
}

pub fn unrooted_pairs(taxa: usize, count: usize) -> Vec<[UnrootedTree; 2]> {
    let mut rng = StdRng::seed_from_u64(taxa as u64);
    let names = taxon_names(taxa);
    (0..count).map(|_| [unrooted_tree(&names, &mut rng), unrooted_tree(&names, &mut rng)]).collect()
}

pub fn rooted_pairs(taxa: usize, count: usize) -> Vec<[RootedTree; 2]> {
    let mut rng = StdRng::seed_from_u64(1000 + taxa as u64);
    let names = taxon_names(taxa);
    (0..count).map(|_| [rooted_tree(&names, &mut rng), rooted_tree(&names, &mut rng)]).collect()
}
