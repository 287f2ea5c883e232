//! Reference implementations for small graphs, written independently of the
//! library's traversal code.

#![allow(dead_code)]

use mbi_core::{Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

/// All-pairs distances by Floyd-Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (u, v, w) in g.arcs() {
        if w < d[u][v] {
            d[u][v] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Shortest-path counts by explicit enumeration of simple paths.
pub struct PathCounts {
    pub dist: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<u64>>,
    /// Paths with `x` strictly inside; zero when `x` is an endpoint.
    pub through: Vec<Vec<u64>>,
}

/// Enumerates every shortest path of the graph, one source at a time.
/// Prefixes that are already longer than the known distance are cut.
pub fn enumerate_paths(g: &Graph, x: NodeId) -> PathCounts {
    let n = g.node_count();
    let mut walker = Walker {
        g,
        x,
        dist: floyd_warshall(g),
        on_path: vec![false; n],
        sigma: vec![vec![0u64; n]; n],
        through: vec![vec![0u64; n]; n],
    };
    for s in 0..n {
        walker.on_path[s] = true;
        walker.walk(s, s, 0.0, false);
        walker.on_path[s] = false;
    }
    PathCounts {
        dist: walker.dist,
        sigma: walker.sigma,
        through: walker.through,
    }
}

struct Walker<'a> {
    g: &'a Graph,
    x: NodeId,
    dist: Vec<Vec<f64>>,
    on_path: Vec<bool>,
    sigma: Vec<Vec<u64>>,
    through: Vec<Vec<u64>>,
}

impl Walker<'_> {
    fn walk(&mut self, s: NodeId, at: NodeId, len: f64, seen_x: bool) {
        if (len - self.dist[s][at]).abs() > TOL {
            return;
        }
        self.sigma[s][at] += 1;
        if seen_x && at != self.x {
            self.through[s][at] += 1;
        }
        let inside = seen_x || (at == self.x && at != s);
        for &(next, w) in self.g.out_neighbors(at) {
            if self.on_path[next] {
                continue;
            }
            self.on_path[next] = true;
            self.walk(s, next, len + w, inside);
            self.on_path[next] = false;
        }
    }
}

/// Betweenness of `x` from enumerated counts.
pub fn betweenness_by_enumeration(g: &Graph, x: NodeId) -> f64 {
    let pc = enumerate_paths(g, x);
    let n = g.node_count();
    let mut b = 0.0;
    for s in 0..n {
        for t in 0..n {
            if s != t && s != x && t != x && pc.sigma[s][t] > 0 {
                b += pc.through[s][t] as f64 / pc.sigma[s][t] as f64;
            }
        }
    }
    b
}

/// Affected sources of inserting `(u, v)` with weight `w`, by checking every
/// node against the distance condition.
pub fn affected_sources_by_filter(dist: &[Vec<f64>], u: NodeId, v: NodeId, w: f64) -> Vec<NodeId> {
    (0..dist.len())
        .filter(|&s| {
            let via = dist[s][u] + w;
            via.is_finite() && (dist[s][v] == f64::INFINITY || dist[s][v] >= via - TOL)
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weighted graph whose weights are small multiples of 0.5, so that
/// equal-length alternatives are common.
pub fn random_weighted(n: usize, p: f64, directed: bool, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut g = Graph::new(n, directed, true);
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if r.gen_bool(p) {
                let w = 0.5 * r.gen_range(1..=4) as f64;
                g.insert_edge(mbi_core::EdgeUpdate::new(u, v, w)).unwrap();
            }
        }
    }
    g
}
