/// Size guards for the exponential methods. Exceeding one yields
/// [`crate::Error::Guard`] instead of an unbounded computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Edge limit for the spanning-tree containment oracle.
    pub oracle_edges: usize,
    /// Taxon limit for exact agreement-forest search.
    pub maf_taxa: usize,
    /// Taxon limit for the breadth-first TBR search over tree space.
    pub tbr_taxa: usize,
    /// Taxon limit for the rooted hybridization number search.
    pub hn_taxa: usize,
    /// Largest reticulation number searched by generator-based solvers.
    pub hn_k: usize,
    /// Taxon limit for the root-uncertain search on the kernel.
    pub ruhn_taxa: usize,
    /// Taxon limit for the exhaustive unrooted-network oracle.
    pub uhn_oracle_taxa: usize,
    /// Reticulation limit for the exhaustive unrooted-network oracle.
    pub uhn_oracle_k: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            oracle_edges: 24,
            maf_taxa: 10,
            tbr_taxa: 7,
            hn_taxa: 6,
            hn_k: 3,
            ruhn_taxa: 16,
            uhn_oracle_taxa: 6,
            uhn_oracle_k: 2,
        }
    }
}
