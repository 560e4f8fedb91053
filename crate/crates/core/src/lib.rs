//! Solvers for the delay-range constrained routing (DRCR) problem and its
//! min-min SRLG-disjoint variant.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! outside world (files, threads, clocks) lives in the companion `drcr` crate;
//! long searches can still be stopped from there through [`Interrupt`].
//!
//! Layout:
//! - [`graph`]: network model, paths, tasks, edge-exclusion views.
//! - [`preprocess`]: reverse shortest-path trees used as pruning bounds.
//! - [`pulse`]: the depth-first pulse search and its terminal variants.
//! - [`btbu`]: iteratively raised cost bounds around the optimal pulse.
//! - [`btcs`]: bottom-top corridor search for protected path pairs.
//! - [`netgen`]: benchmark graph, SRLG and task generators.
//! - [`oracle`]: brute-force ground truth and cost histograms.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod btbu;
pub mod btcs;
mod error;
pub mod graph;
pub mod interrupt;
pub mod netgen;
pub mod oracle;
pub mod preprocess;
pub mod pulse;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{GraphError, PathError, TaskError};
pub use graph::{
    is_connected, remove_conflicting_edges, DrcrTask, Edge, EdgeId, ExclusionMask, Network,
    NetworkView, NodeId, Path, SrlgId, SrlgTask, Task,
};
pub use interrupt::{Interrupt, Never};
pub use preprocess::{build_reverse_trees, ReverseTrees, TreeCache};
pub use report::{Outcome, SolveReport};

/// Sentinel for "no finite value": unreachable tree distances, unbounded
/// cost bounds, relaxed delay limits.
pub const INFINITY: u64 = u64::MAX;
