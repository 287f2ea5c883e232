//! Augmented all-pairs state for one target node `x`.
//!
//! Three row-major `n × n` tables: distances `d[s][t]`, shortest-path counts
//! `σ[s][t]`, and counts of shortest paths with `x` strictly inside,
//! `σx[s][t]`. Row `x` and column `x` of `σx` are zero since those pairs do
//! not contribute to `b_x`; [`ApspState::through_target`] gives the count
//! with endpoints included, which is what the update formulas need when `x`
//! is an endpoint of the inserted arc.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::sssp::{tolerance_for, Sssp, UNREACHABLE};

/// Default cap on the memory of the three tables.
pub const DEFAULT_MEM_CAP_MB: u64 = 2048;

/// Environment variable that overrides [`DEFAULT_MEM_CAP_MB`].
pub const MEM_CAP_ENV: &str = "BC_MEM_CAP_MB";

const BYTES_PER_PAIR: u64 = 8 * 3;

/// Upper bound on the bytes an [`ApspState`] may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryCap {
    pub bytes: u64,
}

impl MemoryCap {
    pub fn megabytes(mb: u64) -> Self {
        Self {
            bytes: mb.saturating_mul(1024 * 1024),
        }
    }

    /// Reads [`MEM_CAP_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MEM_CAP_ENV) {
            Ok(raw) => raw.trim().parse::<u64>().map(Self::megabytes).map_err(|_| {
                Error::Argument(format!("{MEM_CAP_ENV}={raw:?} is not a whole number of MB"))
            }),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Fails unless tables for `n` nodes fit under the cap.
    pub fn check(&self, n: usize) -> Result<()> {
        let needed = (n as u64)
            .checked_mul(n as u64)
            .and_then(|pairs| pairs.checked_mul(BYTES_PER_PAIR));
        match needed {
            Some(bytes) if bytes <= self.bytes => Ok(()),
            _ => Err(Error::Capacity(format!(
                "state for {n} nodes needs 3·n² = {} entries, above the {} MB cap",
                3u128 * n as u128 * n as u128,
                self.bytes / (1024 * 1024)
            ))),
        }
    }
}

impl Default for MemoryCap {
    fn default() -> Self {
        Self::megabytes(DEFAULT_MEM_CAP_MB)
    }
}

/// Per-update scratch space, kept with the state so repeated updates reuse
/// allocations. Excluded from equality.
#[derive(Debug, Clone, Default)]
pub(crate) struct Scratch {
    /// Visit stamps; a node is visited in the current pass when its stamp
    /// equals `epoch`.
    pub visited: Vec<u32>,
    pub epoch: u32,
    pub parent: Vec<NodeId>,
    pub queue: Vec<NodeId>,
    /// Affected sources per target, built along the target traversal.
    pub sources: Vec<Vec<NodeId>>,
    pub root_sources: Vec<NodeId>,
    pub touched: Vec<NodeId>,
    /// Undo log for trial updates: index and entry before each write.
    pub journal: Vec<(usize, Cell)>,
}

impl Scratch {
    pub fn ensure(&mut self, n: usize) {
        if self.visited.len() != n {
            self.visited = vec![0; n];
            self.parent = vec![0; n];
            self.sources = vec![Vec::new(); n];
            self.epoch = 0;
        }
    }

    /// Starts a fresh visit generation.
    pub fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.visited.iter_mut().for_each(|v| *v = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }
}

/// One `(s, t)` entry. The three values of a pair share a cache line, since
/// every update reads and writes them together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub dist: f64,
    pub sigma: u64,
    /// Paths with the target strictly inside.
    pub through: u64,
}

impl Cell {
    const EMPTY: Cell = Cell {
        dist: UNREACHABLE,
        sigma: 0,
        through: 0,
    };

    fn same_bits(&self, other: &Cell) -> bool {
        self.dist.to_bits() == other.dist.to_bits()
            && self.sigma == other.sigma
            && self.through == other.through
    }
}

#[derive(Debug, Clone)]
pub struct ApspState {
    pub(crate) n: usize,
    pub(crate) target: NodeId,
    pub(crate) tolerance: f64,
    /// Row-major `n × n` table.
    pub(crate) cells: Vec<Cell>,
    pub(crate) bx: f64,
    pub(crate) scratch: Scratch,
}

impl PartialEq for ApspState {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.target == other.target
            && self.tables_equal(other)
            && self.bx.to_bits() == other.bx.to_bits()
    }
}

/// Builds the state for target `x` under the memory cap from [`MEM_CAP_ENV`],
/// or the default cap when it is unset.
pub fn init_apsp(g: &Graph, x: NodeId) -> Result<ApspState> {
    init_apsp_with_cap(g, x, MemoryCap::from_env()?)
}

/// One BFS (or Dijkstra for weighted graphs) per source fills `d` and `σ`;
/// an `n²` pass then fills `σx` and sums `b_x`.
pub fn init_apsp_with_cap(g: &Graph, x: NodeId, cap: MemoryCap) -> Result<ApspState> {
    let n = g.node_count();
    if x >= n {
        return Err(Error::UnknownNode { node: x, n });
    }
    cap.check(n)?;

    let mut cells = vec![Cell::EMPTY; n * n];
    let mut sssp = Sssp::new(n);
    for s in 0..n {
        sssp.run(g, s, false)?;
        let row = s * n;
        for &t in &sssp.order {
            cells[row + t].dist = sssp.dist[t];
            cells[row + t].sigma = sssp.sigma[t];
        }
    }

    let mut state = ApspState {
        n,
        target: x,
        tolerance: tolerance_for(g),
        cells,
        bx: 0.0,
        scratch: Scratch::default(),
    };
    state.fill_through_counts()?;
    state.bx = state.recompute_betweenness();
    Ok(state)
}

impl ApspState {
    fn fill_through_counts(&mut self) -> Result<()> {
        let (n, x) = (self.n, self.target);
        for s in 0..n {
            if s == x {
                continue;
            }
            let d_sx = self.cells[s * n + x].dist;
            if d_sx == UNREACHABLE {
                continue;
            }
            let sigma_sx = self.cells[s * n + x].sigma;
            for t in 0..n {
                if t == x || t == s {
                    continue;
                }
                let d_xt = self.cells[x * n + t].dist;
                let d_st = self.cells[s * n + t].dist;
                if d_xt == UNREACHABLE || !self.same_length(d_st, d_sx + d_xt) {
                    continue;
                }
                self.cells[s * n + t].through = sigma_sx
                    .checked_mul(self.cells[x * n + t].sigma)
                    .ok_or(Error::Overflow { s, t })?;
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    /// Cached betweenness of the target.
    pub fn betweenness(&self) -> f64 {
        self.bx
    }

    /// Distance, or [`UNREACHABLE`].
    pub fn distance(&self, s: NodeId, t: NodeId) -> f64 {
        self.cells[s * self.n + t].dist
    }

    pub fn is_reachable(&self, s: NodeId, t: NodeId) -> bool {
        self.distance(s, t) != UNREACHABLE
    }

    pub fn path_count(&self, s: NodeId, t: NodeId) -> u64 {
        self.cells[s * self.n + t].sigma
    }

    /// Stored count of shortest `s -> t` paths with the target strictly
    /// inside; zero when the target is `s` or `t`.
    pub fn path_count_through(&self, s: NodeId, t: NodeId) -> u64 {
        self.cells[s * self.n + t].through
    }

    /// Count of shortest `s -> t` paths visiting the target, endpoints
    /// included: equals `σ[s][t]` when the target is `s` or `t`.
    pub fn through_target(&self, s: NodeId, t: NodeId) -> u64 {
        if s == self.target || t == self.target {
            self.path_count(s, t)
        } else {
            self.path_count_through(s, t)
        }
    }

    /// Tolerance used for distance equality: zero for unit weights.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub(crate) fn same_length(&self, a: f64, b: f64) -> bool {
        if a == UNREACHABLE || b == UNREACHABLE {
            return false;
        }
        (a - b).abs() <= self.tolerance
    }

    /// Fresh summation of `b_x` from the tables.
    pub fn recompute_betweenness(&self) -> f64 {
        let (n, x) = (self.n, self.target);
        let mut b = 0.0;
        for s in 0..n {
            if s == x {
                continue;
            }
            for t in 0..n {
                if t == x || t == s {
                    continue;
                }
                let c = &self.cells[s * n + t];
                if c.through > 0 {
                    b += c.through as f64 / c.sigma as f64;
                }
            }
        }
        b
    }

    /// True when `d`, `σ` and `σx` match entry for entry.
    pub fn tables_equal(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// First `(s, t)` where the tables disagree, for diagnostics.
    pub fn first_difference(&self, other: &Self) -> Option<(NodeId, NodeId)> {
        if self.n != other.n {
            return Some((0, 0));
        }
        (0..self.n * self.n)
            .find(|&i| !self.cells[i].same_bits(&other.cells[i]))
            .map(|i| (i / self.n, i % self.n))
    }

    /// Like [`Self::first_difference`] but comparing distances within `tol`.
    pub fn first_difference_within(&self, other: &Self, tol: f64) -> Option<(NodeId, NodeId)> {
        if self.n != other.n {
            return Some((0, 0));
        }
        (0..self.n * self.n)
            .find(|&i| {
                let (p, q) = (&self.cells[i], &other.cells[i]);
                let (a, b) = (p.dist, q.dist);
                let dist_ok = if a == UNREACHABLE || b == UNREACHABLE {
                    a == b
                } else {
                    (a - b).abs() <= tol
                };
                !dist_ok || p.sigma != q.sigma || p.through != q.through
            })
            .map(|i| (i / self.n, i % self.n))
    }

    /// Checks every structural invariant of the tables and the cached `b_x`.
    pub fn validate(&self) -> Result<()> {
        let (n, x) = (self.n, self.target);
        let fail = |msg: String| Err(Error::Invariant(msg));
        for s in 0..n {
            let diag = self.cells[s * n + s];
            if diag.dist != 0.0 || diag.sigma != 1 || diag.through != 0 {
                return fail(format!("diagonal entry ({s}, {s}) malformed"));
            }
            for t in 0..n {
                let c = self.cells[s * n + t];
                if (c.dist == UNREACHABLE) != (c.sigma == 0) {
                    return fail(format!("reachability of ({s}, {t}) disagrees with σ"));
                }
                if c.through > c.sigma {
                    return fail(format!("σx > σ at ({s}, {t})"));
                }
                let expected = if s == x || t == x || s == t {
                    0
                } else if self.same_length(c.dist, self.distance(s, x) + self.distance(x, t)) {
                    match self.path_count(s, x).checked_mul(self.path_count(x, t)) {
                        Some(v) => v,
                        None => return Err(Error::Overflow { s, t }),
                    }
                } else {
                    0
                };
                if c.through != expected {
                    return fail(format!(
                        "σx({s}, {t}) = {} but σ(s,x)·σ(x,t) rule gives {expected}",
                        c.through
                    ));
                }
            }
        }
        let fresh = self.recompute_betweenness();
        if (fresh - self.bx).abs() > 1e-9 * fresh.abs().max(1.0) {
            return fail(format!(
                "cached b_x {} differs from fresh sum {fresh}",
                self.bx
            ));
        }
        Ok(())
    }
}
