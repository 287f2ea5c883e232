//! Exact static betweenness (Brandes) and rankings.
//!
//! Betweenness is summed over ordered pairs `(s, t)`, `s != t`, both distinct
//! from the node, with unreachable pairs contributing nothing. Undirected
//! graphs use the same ordered-pair sum on their symmetric digraph, so every
//! unordered pair counts twice.
//!
//! Summation is serial in source order, so results are bit-identical across
//! runs.

use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::sssp::Sssp;

/// Betweenness of every node.
pub fn brandes_all(g: &Graph) -> Result<Vec<f64>> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut sssp = Sssp::new(n);
    let mut delta = vec![0.0f64; n];
    for s in 0..n {
        sssp.run(g, s, true)?;
        for &w in &sssp.order {
            delta[w] = 0.0;
        }
        for &w in sssp.order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sssp.sigma[w] as f64;
            for &p in &sssp.preds[w] {
                delta[p] += sssp.sigma[p] as f64 * coeff;
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    Ok(bc)
}

/// Betweenness of a single node. Costs as much as [`brandes_all`].
pub fn betweenness_of(g: &Graph, x: NodeId) -> Result<f64> {
    Ok(brandes_all(g)?[x])
}

/// Relative slack under which two scores count as tied when ranking.
pub const RANK_TIE_TOLERANCE: f64 = 1e-9;

fn strictly_above(a: f64, b: f64) -> bool {
    a > b + RANK_TIE_TOLERANCE * b.abs().max(1.0)
}

/// `r_v = |{u : b_u > b_v}| + 1`. Scores within [`RANK_TIE_TOLERANCE`] of
/// each other share a rank, so floating-point noise does not split ties.
pub fn ranks(b: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = b.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    b.iter()
        .map(|&bv| sorted.partition_point(|&bu| strictly_above(bu, bv)) + 1)
        .collect()
}

/// Rank of one node given the full score table.
pub fn rank_of(b: &[f64], v: NodeId) -> usize {
    b.iter().filter(|&&bu| strictly_above(bu, b[v])).count() + 1
}
