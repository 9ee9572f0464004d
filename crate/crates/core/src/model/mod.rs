//! Graph, tree and network data model.

mod image;
mod rooted;
mod tree;
mod unrooted;

pub use image::Image;
pub use rooted::{RootedNetwork, RootedTree};
pub use tree::*;
pub use unrooted::{TidyEvent, UnrootedNetwork, UnrootedTree};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;
pub type Taxon = String;

/// Prefix reserved for taxa minted by reductions and gadgets.
pub const RESERVED_PREFIX: &str = "__";

/// Taxon names are nonempty, match `[A-Za-z0-9_.-]+`.
pub fn check_taxon_name(name: &str) -> Result<()> {
    if name.is_empty()
        || !name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || b == b'-')
    {
        return Err(Error::Invalid(format!("bad taxon name {name:?}")));
    }
    Ok(())
}

/// Rejects input taxa that collide with the reserved namespace.
pub fn check_user_taxa<'a>(taxa: impl IntoIterator<Item = &'a Taxon>) -> Result<()> {
    for t in taxa {
        check_taxon_name(t)?;
        if t.starts_with(RESERVED_PREFIX) {
            return Err(Error::Invalid(format!(
                "taxon {t} uses the reserved prefix {RESERVED_PREFIX}"
            )));
        }
    }
    Ok(())
}
