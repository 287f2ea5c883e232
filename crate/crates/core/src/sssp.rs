//! Single-source shortest paths with path counting, shared by the static
//! betweenness routine and the all-pairs initialization.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Absolute tolerance for comparing weighted path lengths.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Distance of an unreachable node. Any sum involving it stays unreachable.
pub const UNREACHABLE: f64 = f64::INFINITY;

/// Tolerance to use for a graph: exact comparisons for unit weights.
pub fn tolerance_for(g: &Graph) -> f64 {
    if g.is_weighted() {
        WEIGHT_TOLERANCE
    } else {
        0.0
    }
}

#[derive(Clone, Copy)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Reusable buffers for repeated single-source runs.
pub(crate) struct Sssp {
    pub dist: Vec<f64>,
    pub sigma: Vec<u64>,
    /// Settled nodes in non-decreasing distance order.
    pub order: Vec<NodeId>,
    pub preds: Vec<Vec<NodeId>>,
    queue: VecDeque<NodeId>,
    heap: BinaryHeap<HeapEntry>,
    settled: Vec<bool>,
}

impl Sssp {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHABLE; n],
            sigma: vec![0; n],
            order: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            queue: VecDeque::with_capacity(n),
            heap: BinaryHeap::new(),
            settled: vec![false; n],
        }
    }

    fn reset(&mut self, track_preds: bool) {
        for &u in &self.order {
            self.dist[u] = UNREACHABLE;
            self.sigma[u] = 0;
            self.settled[u] = false;
            if track_preds {
                self.preds[u].clear();
            }
        }
        self.order.clear();
    }

    /// Fills `dist`, `sigma` and `order` for source `s`; predecessor lists too
    /// when `track_preds` is set.
    pub fn run(&mut self, g: &Graph, s: NodeId, track_preds: bool) -> Result<()> {
        self.reset(track_preds);
        if g.is_weighted() {
            self.dijkstra(g, s, track_preds)
        } else {
            self.bfs(g, s, track_preds)
        }
    }

    fn add_paths(&mut self, s: NodeId, from: NodeId, to: NodeId) -> Result<()> {
        self.sigma[to] = self.sigma[to]
            .checked_add(self.sigma[from])
            .ok_or(Error::Overflow { s, t: to })?;
        Ok(())
    }

    fn bfs(&mut self, g: &Graph, s: NodeId, track_preds: bool) -> Result<()> {
        self.dist[s] = 0.0;
        self.sigma[s] = 1;
        self.queue.clear();
        self.queue.push_back(s);
        // Nodes enter `order` when discovered so `reset` sees every touched slot.
        self.order.push(s);
        while let Some(v) = self.queue.pop_front() {
            let next = self.dist[v] + 1.0;
            for &(w, _) in g.out_neighbors(v) {
                if self.dist[w] == UNREACHABLE {
                    self.dist[w] = next;
                    self.queue.push_back(w);
                    self.order.push(w);
                }
                if self.dist[w] == next {
                    self.add_paths(s, v, w)?;
                    if track_preds {
                        self.preds[w].push(v);
                    }
                }
            }
        }
        Ok(())
    }

    fn dijkstra(&mut self, g: &Graph, s: NodeId, track_preds: bool) -> Result<()> {
        self.dist[s] = 0.0;
        self.sigma[s] = 1;
        self.heap.clear();
        self.heap.push(HeapEntry { dist: 0.0, node: s });
        while let Some(HeapEntry { dist, node: v }) = self.heap.pop() {
            if self.settled[v] || dist > self.dist[v] {
                continue;
            }
            self.settled[v] = true;
            self.order.push(v);
            for &(w, wt) in g.out_neighbors(v) {
                if self.settled[w] {
                    continue;
                }
                let nd = dist + wt;
                if nd < self.dist[w] - WEIGHT_TOLERANCE {
                    self.dist[w] = nd;
                    self.sigma[w] = 0;
                    if track_preds {
                        self.preds[w].clear();
                    }
                    self.add_paths(s, v, w)?;
                    if track_preds {
                        self.preds[w].push(v);
                    }
                    self.heap.push(HeapEntry { dist: nd, node: w });
                } else if (nd - self.dist[w]).abs() <= WEIGHT_TOLERANCE {
                    self.add_paths(s, v, w)?;
                    if track_preds {
                        self.preds[w].push(v);
                    }
                }
            }
        }
        Ok(())
    }
}
