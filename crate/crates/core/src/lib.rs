//! Transfinite digraphs presented by finite data.
//!
//! A document describes a conventional digraph together with periodic cell
//! templates, walk presentations and rank-raising partitions. From it the
//! crate computes ditips (classes of extended walks), higher-rank vertices,
//! diwalks and semiwalks of every finite rank, the arrow rank and rank
//! omega, and the strong, unilateral and weak components at each rank.

pub mod cli;
pub mod connect;
pub mod elevate;
pub mod model;
pub mod omega;
pub mod par;
pub mod present;
pub mod rank;
pub mod walk;

mod error;

pub use error::{Error, Result};
pub use model::{Digraph, DigraphBundle, Direction, Id, Index, Item};
pub use rank::RankTag;
