//! Single-node incremental betweenness under edge insertions and weight
//! decreases.
//!
//! After inserting `(u, v)` with weight `ω`, a pair `(s, t)` is affected when
//! `d[s][t] ≥ d[s][u] + ω + d[v][t]`. Every affected source lies in `S(v)`
//! and every affected target in `T(u)`. `S(v)` comes from a pruned traversal
//! rooted at `u` over in-arcs; `T(u)` from a pruned traversal rooted at `v`
//! over out-arcs along shortest-path predecessor links. A target `t` only has
//! to scan the affected sources of its traversal parent, since the sources of
//! `t` are a subset of those of any shortest-path predecessor of `t` from `v`.
//!
//! For each affected pair the old share `σx/σ` is removed from `b_x`, the
//! counts are recomputed (strictly shorter: only new paths survive; equal
//! length: new paths are added to the old ones) and the new share is added.
//!
//! Rows `d[s][u]` and columns `d[v][t]` are never affected by the insertion,
//! and each pair is visited at most once per pass, so all reads inside a pass
//! see pre-insertion values.
//!
//! Undirected insertions run two directed passes, `(u, v)` then `(v, u)`.

use std::ops::AddAssign;

use crate::apsp::{ApspState, Cell, Scratch};
use crate::error::{Error, Result};
use crate::graph::{EdgeUpdate, Graph, NodeId};
use crate::sssp::UNREACHABLE;

/// Per-update work counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// `|S(v)|` summed over passes.
    pub affected_sources: usize,
    /// `|T(u)|` summed over passes.
    pub affected_targets: usize,
    /// Pairs tested against the affected condition: `Σ_t |S(P(t))|`, plus the
    /// inserted pair itself.
    pub examined_pairs: usize,
    /// Pairs whose distance or path counts changed.
    pub affected_pairs: usize,
    /// Passes skipped because the arc created no shortest path.
    pub noop_passes: usize,
}

impl AddAssign for UpdateStats {
    fn add_assign(&mut self, o: Self) {
        self.affected_sources += o.affected_sources;
        self.affected_targets += o.affected_targets;
        self.examined_pairs += o.examined_pairs;
        self.affected_pairs += o.affected_pairs;
        self.noop_passes += o.noop_passes;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    /// New paths strictly shorter than `d[s][t]` (or `t` newly reachable).
    Shorter,
    /// New paths exactly as long as `d[s][t]`.
    Equal,
}

/// Classifies `old` against the length `via` of the best path through the new
/// arc. An unreachable `via` never affects anything.
fn classify(tol: f64, old: f64, via: f64) -> Option<Case> {
    if via == UNREACHABLE {
        None
    } else if old == UNREACHABLE || old > via + tol {
        Some(Case::Shorter)
    } else if (old - via).abs() <= tol {
        Some(Case::Equal)
    } else {
        None
    }
}

type JournalEntry = (usize, Cell);

fn overflow(s: NodeId, t: NodeId) -> Error {
    Error::Overflow { s, t }
}

/// `(σ', σx')` for pairs whose new shortest paths all use the new arc.
fn shorter_counts(
    st: &ApspState,
    s: NodeId,
    t: NodeId,
    u: NodeId,
    v: NodeId,
) -> Result<(u64, u64)> {
    let sigma_su = st.path_count(s, u);
    let sigma_vt = st.path_count(v, t);
    let via_su = st.through_target(s, u);
    let via_vt = st.through_target(v, t);
    if via_su > 0 && via_vt > 0 {
        return Err(Error::Invariant(format!(
            "target on both s→u and v→t shortest paths for pair ({s}, {t})"
        )));
    }
    let total = sigma_su
        .checked_mul(sigma_vt)
        .ok_or_else(|| overflow(s, t))?;
    let through = via_su
        .checked_mul(sigma_vt)
        .and_then(|a| sigma_su.checked_mul(via_vt).and_then(|b| a.checked_add(b)))
        .ok_or_else(|| overflow(s, t))?;
    Ok((total, through))
}

/// `(σ', σx')` for pairs that keep their old shortest paths and gain new ones.
fn equal_counts(st: &ApspState, s: NodeId, t: NodeId, u: NodeId, v: NodeId) -> Result<(u64, u64)> {
    let (new_total, new_through) = shorter_counts(st, s, t, u, v)?;
    let total = st
        .path_count(s, t)
        .checked_add(new_total)
        .ok_or_else(|| overflow(s, t))?;
    let through = st
        .through_target(s, t)
        .checked_add(new_through)
        .ok_or_else(|| overflow(s, t))?;
    Ok((total, through))
}

fn check_pair(st: &ApspState, s: NodeId, t: NodeId, u: NodeId, v: NodeId) -> Result<()> {
    let n = st.node_count();
    for node in [s, t, u, v] {
        if node >= n {
            return Err(Error::UnknownNode { node, n });
        }
    }
    Ok(())
}

/// New `(σ[s][t], σx[s][t])` when the arc `(u, v)` of weight `w` yields
/// strictly shorter `s -> t` paths. The through-count includes paths where
/// the target is `s` or `t`.
pub fn update_sigma_gr(
    st: &ApspState,
    s: NodeId,
    t: NodeId,
    u: NodeId,
    v: NodeId,
    w: f64,
) -> Result<(u64, u64)> {
    check_pair(st, s, t, u, v)?;
    let via = st.distance(s, u) + w + st.distance(v, t);
    if classify(st.tolerance(), st.distance(s, t), via) != Some(Case::Shorter) {
        return Err(Error::Argument(format!(
            "pair ({s}, {t}) is not strictly improved by ({u}, {v})"
        )));
    }
    shorter_counts(st, s, t, u, v)
}

/// New `(σ[s][t], σx[s][t])` when the arc `(u, v)` of weight `w` yields
/// additional `s -> t` paths of the current length.
pub fn update_sigma_eq(
    st: &ApspState,
    s: NodeId,
    t: NodeId,
    u: NodeId,
    v: NodeId,
    w: f64,
) -> Result<(u64, u64)> {
    check_pair(st, s, t, u, v)?;
    let via = st.distance(s, u) + w + st.distance(v, t);
    if classify(st.tolerance(), st.distance(s, t), via) != Some(Case::Equal) {
        return Err(Error::Argument(format!(
            "pair ({s}, {t}) gains no equal-length path from ({u}, {v})"
        )));
    }
    equal_counts(st, s, t, u, v)
}

/// Applies one affected pair to the tables and to `b_x`.
#[allow(clippy::too_many_arguments)]
fn update_pair(
    st: &mut ApspState,
    s: NodeId,
    t: NodeId,
    u: NodeId,
    v: NodeId,
    via: f64,
    case: Case,
    journal: &mut Option<&mut Vec<JournalEntry>>,
) -> Result<()> {
    let n = st.n;
    let idx = s * n + t;
    let (total, through) = match case {
        Case::Shorter => shorter_counts(st, s, t, u, v)?,
        Case::Equal => equal_counts(st, s, t, u, v)?,
    };
    let counted = s != st.target && t != st.target;
    let cell = &mut st.cells[idx];
    if let Some(j) = journal.as_deref_mut() {
        j.push((idx, *cell));
    }
    let mut bx = st.bx;
    if counted && cell.through > 0 {
        bx -= cell.through as f64 / cell.sigma as f64;
    }
    if case == Case::Shorter {
        cell.dist = via;
    }
    cell.sigma = total;
    cell.through = if counted { through } else { 0 };
    st.bx = bx;
    if counted && through > 0 {
        st.bx += through as f64 / total as f64;
    }
    Ok(())
}

/// Pruned traversal from `u` over in-arcs collecting
/// `S(v) = {s : d[s][u] + w ≤ d[s][v]}` into `scratch.root_sources`.
fn collect_sources(g: &Graph, st: &ApspState, u: NodeId, v: NodeId, w: f64, scratch: &mut Scratch) {
    let n = st.n;
    let tol = st.tolerance;
    let epoch = scratch.next_epoch();
    let found = &mut scratch.root_sources;
    found.clear();
    let affected =
        |s: NodeId| classify(tol, st.cells[s * n + v].dist, st.cells[s * n + u].dist + w).is_some();
    if !affected(u) {
        return;
    }
    scratch.visited[u] = epoch;
    found.push(u);
    let mut head = 0;
    while head < found.len() {
        let p = found[head];
        head += 1;
        for &(s, _) in g.in_neighbors(p) {
            if scratch.visited[s] != epoch && affected(s) {
                scratch.visited[s] = epoch;
                found.push(s);
            }
        }
    }
}

/// Affected sources `S(v)` of inserting `e` into the graph described by `st`.
pub fn find_affected_sources(g: &Graph, st: &ApspState, e: EdgeUpdate) -> Result<Vec<NodeId>> {
    check_pair(st, e.u, e.v, e.u, e.v)?;
    let mut scratch = Scratch::default();
    scratch.ensure(st.n);
    collect_sources(g, st, e.u, e.v, e.weight, &mut scratch);
    let mut out = scratch.root_sources;
    out.sort_unstable();
    Ok(out)
}

/// One directed pass for the arc `(u, v)` of weight `w`.
fn directed_pass(
    g: &Graph,
    st: &mut ApspState,
    u: NodeId,
    v: NodeId,
    w: f64,
    mut journal: Option<&mut Vec<JournalEntry>>,
) -> Result<UpdateStats> {
    let mut scratch = std::mem::take(&mut st.scratch);
    scratch.ensure(st.n);
    let result = pass_with_scratch(g, st, u, v, w, &mut journal, &mut scratch);
    for &t in &scratch.touched {
        scratch.sources[t].clear();
    }
    scratch.touched.clear();
    st.scratch = scratch;
    result
}

fn pass_with_scratch(
    g: &Graph,
    st: &mut ApspState,
    u: NodeId,
    v: NodeId,
    w: f64,
    journal: &mut Option<&mut Vec<JournalEntry>>,
    scratch: &mut Scratch,
) -> Result<UpdateStats> {
    let n = st.n;
    let tol = st.tolerance;
    let mut stats = UpdateStats::default();

    // The inserted pair itself.
    let Some(case) = classify(tol, st.cells[u * n + v].dist, w) else {
        stats.noop_passes = 1;
        return Ok(stats);
    };
    update_pair(st, u, v, u, v, w, case, journal)?;
    stats.examined_pairs += 1;
    stats.affected_pairs += 1;

    collect_sources(g, st, u, v, w, scratch);
    stats.affected_sources = scratch.root_sources.len();

    let epoch = scratch.next_epoch();
    scratch.queue.clear();
    scratch.queue.push(v);
    scratch.visited[v] = epoch;
    scratch.parent[v] = v;
    let mut head = 0;
    while head < scratch.queue.len() {
        let t = scratch.queue[head];
        head += 1;
        let d_vt = st.cells[v * n + t].dist;
        let mut own = std::mem::take(&mut scratch.sources[t]);
        let candidates: &[NodeId] = if t == v || scratch.parent[t] == v {
            &scratch.root_sources
        } else {
            &scratch.sources[scratch.parent[t]]
        };
        for &s in candidates {
            if t == v && s == u {
                continue;
            }
            stats.examined_pairs += 1;
            let via = st.cells[s * n + u].dist + w + d_vt;
            if let Some(case) = classify(tol, st.cells[s * n + t].dist, via) {
                update_pair(st, s, t, u, v, via, case, journal)?;
                stats.affected_pairs += 1;
                if t != v {
                    own.push(s);
                }
            }
        }
        scratch.sources[t] = own;
        scratch.touched.push(t);

        for &(y, wt) in g.out_neighbors(t) {
            if scratch.visited[y] == epoch {
                continue;
            }
            let d_vy = st.cells[v * n + y].dist;
            // Only follow shortest-path predecessor links from v.
            if !st.same_length(d_vy, d_vt + wt) {
                continue;
            }
            if classify(tol, st.cells[u * n + y].dist, w + d_vy).is_none() {
                continue;
            }
            scratch.visited[y] = epoch;
            scratch.parent[y] = t;
            scratch.queue.push(y);
        }
    }
    stats.affected_targets = scratch.queue.len();
    Ok(stats)
}

fn check_update(g: &Graph, st: &ApspState, e: &EdgeUpdate) -> Result<()> {
    let n = st.node_count();
    if g.node_count() != n {
        return Err(Error::Argument(format!(
            "graph has {} nodes but state has {n}",
            g.node_count()
        )));
    }
    for node in [e.u, e.v] {
        if node >= n {
            return Err(Error::UnknownNode { node, n });
        }
    }
    if e.u == e.v {
        return Err(Error::SelfLoop(e.u));
    }
    if !(e.weight.is_finite() && e.weight > 0.0) {
        return Err(Error::Argument(format!(
            "edge weight must be positive, got {}",
            e.weight
        )));
    }
    Ok(())
}

fn run_passes(
    g: &Graph,
    st: &mut ApspState,
    e: EdgeUpdate,
    mut journal: Option<&mut Vec<JournalEntry>>,
) -> Result<UpdateStats> {
    let mut stats = directed_pass(g, st, e.u, e.v, e.weight, journal.as_deref_mut())?;
    if !g.is_directed() {
        stats += directed_pass(g, st, e.v, e.u, e.weight, journal)?;
    }
    Ok(stats)
}

/// Inserts `e` into `g` (or lowers its weight) and brings `st` and its cached
/// `b_x` up to date. When the arc creates no shortest path the tables are left
/// untouched.
///
/// On an error after the graph was modified (path-count overflow) the state
/// is left partially updated and must be rebuilt.
pub fn apply_insertion(g: &mut Graph, st: &mut ApspState, e: EdgeUpdate) -> Result<UpdateStats> {
    check_update(g, st, &e)?;
    g.insert_edge(e)?;
    run_passes(g, st, e, None)
}

/// `b_x` after inserting `e`, leaving `g` and `st` unchanged. The update is
/// applied with an undo journal and rolled back, so the cost is that of the
/// update itself rather than of a state copy.
pub fn evaluate_insertion(g: &Graph, st: &mut ApspState, e: EdgeUpdate) -> Result<f64> {
    evaluate_insertion_with_stats(g, st, e).map(|(b, _)| b)
}

/// [`evaluate_insertion`] plus the work counters of the trial update.
pub fn evaluate_insertion_with_stats(
    g: &Graph,
    st: &mut ApspState,
    e: EdgeUpdate,
) -> Result<(f64, UpdateStats)> {
    check_update(g, st, &e)?;
    if let Some(current) = g.arc_weight(e.u, e.v) {
        if e.weight >= current {
            return Err(Error::Duplicate {
                u: e.u,
                v: e.v,
                weight: current,
                new_weight: e.weight,
            });
        }
    }
    let saved_bx = st.bx;
    let mut journal = std::mem::take(&mut st.scratch.journal);
    journal.clear();
    let result = run_passes(g, st, e, Some(&mut journal));
    let value = st.bx;
    for &(idx, cell) in journal.iter().rev() {
        st.cells[idx] = cell;
    }
    st.bx = saved_bx;
    journal.clear();
    st.scratch.journal = journal;
    result.map(|stats| (value, stats))
}
