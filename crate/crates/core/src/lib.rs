//! Betweenness improvement for a single target node.
//!
//! A node `x` gains betweenness when new arcs route more shortest paths
//! through it. This crate keeps an all-pairs table of distances, path counts
//! and path counts through `x` up to date under arc insertions, so the value
//! of a candidate arc can be measured without recomputing betweenness from
//! scratch. On top of that sit greedy solvers for choosing `k` arcs into `x`,
//! an exhaustive optimum for small graphs, simple baselines and rank metrics.

pub mod apsp;
pub mod bc_static;
pub mod bench;
pub mod error;
pub mod graph;
pub mod improve;
pub mod si_update;
mod sssp;

pub use apsp::{init_apsp, init_apsp_with_cap, ApspState, MemoryCap};
pub use bc_static::{betweenness_of, brandes_all, rank_of, ranks};
pub use error::{Error, Result};
pub use graph::{EdgeUpdate, Graph, NodeId};
pub use improve::{
    baseline, brute_force_optimum, greedy_mbi, greedy_mbi_pruned, BaselineKind, ImprovementSolution,
};
pub use si_update::{apply_insertion, evaluate_insertion, UpdateStats};
pub use sssp::{tolerance_for, UNREACHABLE, WEIGHT_TOLERANCE};
