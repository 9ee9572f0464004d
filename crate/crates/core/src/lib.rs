//! Exact algorithms for embedding unrooted phylogenetic trees into networks:
//! tree containment, unrooted and root-uncertain hybridization number, the
//! reduction rules that kernelize them, and brute-force oracles.

pub mod acceptance;
pub mod error;
pub mod gadgets;
pub mod hn;
pub mod limits;
pub mod model;
pub mod newick;
pub mod random;
pub mod reduce;
pub mod ruhn;
pub mod uhn;
pub mod utc;

pub use error::{Error, Result};
pub use limits::Limits;
pub use model::*;
