//! Maximum betweenness improvement: pick up to `k` new arcs `(u, v)` into a
//! target `v` so that `b_v` is as large as possible.
//!
//! Solvers: the greedy algorithm (each round commits the arc with the largest
//! marginal gain, candidates evaluated with the incremental update), its lazy
//! variant that skips candidates whose previous gain cannot beat the round's
//! best, an exhaustive optimum over all `k`-subsets by static recomputation,
//! and three baselines (top out-degree, top betweenness, uniform random).
//!
//! Ties are always broken towards the smallest node id.

use std::time::Instant;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::apsp::{init_apsp, ApspState};
use crate::bc_static::{betweenness_of, brandes_all, rank_of, ranks};
use crate::error::{Error, Result};
use crate::graph::{sample_without_replacement, EdgeUpdate, Graph, NodeId};
use crate::si_update::{apply_insertion, evaluate_insertion};

/// Two objective values closer than this (relative) are treated as equal
/// when picking a maximizer.
pub const OBJECTIVE_TIE_TOLERANCE: f64 = 1e-9;

/// Default bound on the number of subsets [`brute_force_optimum`] examines.
pub const DEFAULT_SUBSET_BUDGET: u64 = 1_000_000;

fn improves_on(candidate: f64, best: f64) -> bool {
    candidate > best + OBJECTIVE_TIE_TOLERANCE * best.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementSolution {
    pub target: NodeId,
    /// `b_v` before any insertion.
    pub initial: f64,
    /// Added arcs `(u, target)` in insertion order.
    pub edges: Vec<(NodeId, NodeId)>,
    /// `b_v` after each insertion.
    pub trace: Vec<f64>,
    /// Number of objective evaluations performed.
    pub evaluations: usize,
    /// Wall time in milliseconds from solver start until each step was known.
    pub elapsed_ms: Vec<f64>,
}

impl ImprovementSolution {
    fn empty(target: NodeId, initial: f64) -> Self {
        Self {
            target,
            initial,
            edges: Vec::new(),
            trace: Vec::new(),
            evaluations: 0,
            elapsed_ms: Vec::new(),
        }
    }

    /// `b_v` after the last insertion, or the initial value.
    pub fn final_betweenness(&self) -> f64 {
        self.trace.last().copied().unwrap_or(self.initial)
    }

    pub fn tails(&self) -> Vec<NodeId> {
        self.edges.iter().map(|&(u, _)| u).collect()
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn check_target(g: &Graph, v: NodeId) -> Result<()> {
    if v >= g.node_count() {
        return Err(Error::UnknownNode {
            node: v,
            n: g.node_count(),
        });
    }
    Ok(())
}

/// Nodes that may receive a new arc into `v`: everything except `v` and its
/// current in-neighbors, ascending.
pub fn candidates(g: &Graph, v: NodeId) -> Vec<NodeId> {
    (0..g.node_count())
        .filter(|&u| u != v && !g.has_arc(u, v))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Worker threads for candidate evaluation; results do not depend on it.
    pub threads: usize,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

/// Greedy MBI with serial candidate evaluation.
pub fn greedy_mbi(g: &Graph, v: NodeId, k: usize) -> Result<ImprovementSolution> {
    greedy_mbi_with(g, v, k, GreedyOptions::default())
}

/// `b_v` after adding each candidate arc to the current graph.
fn evaluate_round(
    g: &Graph,
    st: &mut ApspState,
    v: NodeId,
    pool: &[NodeId],
    threads: usize,
) -> Result<Vec<f64>> {
    if threads <= 1 || pool.len() < 2 {
        return pool
            .iter()
            .map(|&u| evaluate_insertion(g, st, EdgeUpdate::unit(u, v)))
            .collect();
    }
    let chunk = pool.len().div_ceil(threads);
    let base: &ApspState = st;
    let parts: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pool
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut local = base.clone();
                    part.iter()
                        .map(|&u| evaluate_insertion(g, &mut local, EdgeUpdate::unit(u, v)))
                        .collect::<Result<Vec<f64>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("candidate evaluation thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(pool.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Greedy MBI: `k` rounds, each committing the candidate arc whose insertion
/// gives the largest `b_v`. Stops early when no candidate remains.
pub fn greedy_mbi_with(
    g: &Graph,
    v: NodeId,
    k: usize,
    opts: GreedyOptions,
) -> Result<ImprovementSolution> {
    check_target(g, v)?;
    let start = Instant::now();
    let mut graph = g.clone();
    let mut st = init_apsp(&graph, v)?;
    let mut sol = ImprovementSolution::empty(v, st.betweenness());
    let mut pool = candidates(&graph, v);

    for _ in 0..k {
        if pool.is_empty() {
            break;
        }
        let values = evaluate_round(&graph, &mut st, v, &pool, opts.threads)?;
        sol.evaluations += values.len();
        let mut best = 0;
        for (i, &b) in values.iter().enumerate() {
            if improves_on(b, values[best]) {
                best = i;
            }
        }
        let u = pool.remove(best);
        apply_insertion(&mut graph, &mut st, EdgeUpdate::unit(u, v))?;
        sol.edges.push((u, v));
        sol.trace.push(st.betweenness());
        sol.elapsed_ms.push(ms_since(start));
    }
    Ok(sol)
}

/// Greedy MBI with lazy evaluation, valid on directed graphs where `b_v` is
/// submodular in the set of added arcs.
///
/// Each candidate keeps the gain `Δ(u)` measured the last time it was
/// evaluated. From the second round on, a candidate is re-evaluated only when
/// `b_v(S) + Δ(u)` exceeds the best value `LB` seen so far in the round.
pub fn greedy_mbi_pruned(g: &Graph, v: NodeId, k: usize) -> Result<ImprovementSolution> {
    check_target(g, v)?;
    if !g.is_directed() {
        return Err(Error::Argument(
            "pruned greedy requires a directed graph (b_v is not submodular on undirected graphs)"
                .into(),
        ));
    }
    let start = Instant::now();
    let mut graph = g.clone();
    let mut st = init_apsp(&graph, v)?;
    let mut sol = ImprovementSolution::empty(v, st.betweenness());
    let n = graph.node_count();
    let mut gain = vec![0.0f64; n];
    let mut pool = candidates(&graph, v);

    for round in 0..k {
        if pool.is_empty() {
            break;
        }
        let current = st.betweenness();
        let mut lower_bound = 0.0f64;
        let mut best: Option<(usize, f64)> = None;
        for (i, &u) in pool.iter().enumerate() {
            if round > 0 && lower_bound >= current + gain[u] {
                continue;
            }
            let b = evaluate_insertion(&graph, &mut st, EdgeUpdate::unit(u, v))?;
            sol.evaluations += 1;
            gain[u] = b - current;
            lower_bound = lower_bound.max(b);
            match best {
                Some((_, bb)) if !improves_on(b, bb) => {}
                _ => best = Some((i, b)),
            }
        }
        // Nothing evaluated: every candidate is bounded by LB = 0.
        let idx = best.map_or(0, |(i, _)| i);
        let u = pool.remove(idx);
        apply_insertion(&mut graph, &mut st, EdgeUpdate::unit(u, v))?;
        sol.edges.push((u, v));
        sol.trace.push(st.betweenness());
        sol.elapsed_ms.push(ms_since(start));
    }
    Ok(sol)
}

/// `C(n, k)` or `None` once it exceeds `limit`.
fn binomial_capped(n: usize, k: usize, limit: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > limit as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `b_v` after each prefix of `edges` is added, by static recomputation.
pub fn static_trace(g: &Graph, v: NodeId, edges: &[(NodeId, NodeId)]) -> Result<Vec<f64>> {
    let mut graph = g.clone();
    let mut trace = Vec::with_capacity(edges.len());
    for &(u, w) in edges {
        graph.insert_edge(EdgeUpdate::unit(u, w))?;
        trace.push(betweenness_of(&graph, v)?);
    }
    Ok(trace)
}

/// Exhaustive optimum with the default subset budget.
pub fn brute_force_optimum(g: &Graph, v: NodeId, k: usize) -> Result<ImprovementSolution> {
    brute_force_optimum_with_budget(g, v, k, DEFAULT_SUBSET_BUDGET)
}

/// Evaluates `b_v(S)` for every `min(k, |candidates|)`-subset of candidate
/// tails by static recomputation and returns a maximizer, preferring the
/// lexicographically smallest tail set among ties.
pub fn brute_force_optimum_with_budget(
    g: &Graph,
    v: NodeId,
    k: usize,
    budget: u64,
) -> Result<ImprovementSolution> {
    check_target(g, v)?;
    let start = Instant::now();
    let pool = candidates(g, v);
    let size = k.min(pool.len());
    let Some(count) = binomial_capped(pool.len(), size, budget) else {
        return Err(Error::Capacity(format!(
            "C({}, {size}) subsets exceed the budget of {budget}",
            pool.len()
        )));
    };
    let mut sol = ImprovementSolution::empty(v, betweenness_of(g, v)?);
    if size == 0 {
        return Ok(sol);
    }

    let mut best: Option<(Vec<NodeId>, f64)> = None;
    for subset in pool.iter().copied().combinations(size) {
        let mut graph = g.clone();
        for &u in &subset {
            graph.insert_edge(EdgeUpdate::unit(u, v))?;
        }
        let b = betweenness_of(&graph, v)?;
        sol.evaluations += 1;
        match &best {
            Some((_, bb)) if !improves_on(b, *bb) => {}
            _ => best = Some((subset, b)),
        }
    }
    debug_assert_eq!(sol.evaluations as u64, count);

    let (tails, _) = best.expect("at least one subset");
    sol.edges = tails.iter().map(|&u| (u, v)).collect();
    sol.trace = static_trace(g, v, &sol.edges)?;
    let total = ms_since(start);
    sol.elapsed_ms = vec![total; sol.edges.len()];
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Highest out-degree (degree for undirected graphs) first.
    TopDegree,
    /// Highest betweenness first.
    TopBetweenness,
    /// Uniform sample without replacement.
    Random { seed: u64 },
}

/// Picks `k` tails by a fixed rule on the original graph, then inserts them in
/// that order and records `b_v` after each insertion.
pub fn baseline(g: &Graph, v: NodeId, k: usize, kind: BaselineKind) -> Result<ImprovementSolution> {
    check_target(g, v)?;
    let start = Instant::now();
    let pool = candidates(g, v);
    let take = k.min(pool.len());
    let tails: Vec<NodeId> = match kind {
        BaselineKind::TopDegree => top_by(&pool, take, |u| g.out_degree(u) as f64),
        BaselineKind::TopBetweenness => {
            let bc = brandes_all(g)?;
            top_by(&pool, take, |u| bc[u])
        }
        BaselineKind::Random { seed } => sample_without_replacement(&pool, take, seed),
    };

    let mut graph = g.clone();
    let mut st = init_apsp(&graph, v)?;
    let mut sol = ImprovementSolution::empty(v, st.betweenness());
    for u in tails {
        apply_insertion(&mut graph, &mut st, EdgeUpdate::unit(u, v))?;
        sol.edges.push((u, v));
        sol.trace.push(st.betweenness());
        sol.elapsed_ms.push(ms_since(start));
    }
    Ok(sol)
}

fn top_by(pool: &[NodeId], k: usize, score: impl Fn(NodeId) -> f64) -> Vec<NodeId> {
    let mut ordered: Vec<(NodeId, f64)> = pool.iter().map(|&u| (u, score(u))).collect();
    ordered.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ordered.into_iter().take(k).map(|(u, _)| u).collect()
}

/// `b·100 / ((n−1)(n−2))`; undefined below three nodes.
pub fn percentage_betweenness(b: f64, n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    Some(b * 100.0 / ((n - 1) as f64 * (n - 2) as f64))
}

/// `r·100 / n`.
pub fn percentage_rank(r: usize, n: usize) -> f64 {
    r as f64 * 100.0 / n as f64
}

/// Betweenness and rank of one node before and after a set of insertions.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub b_before: f64,
    pub b_after: f64,
    pub r_before: usize,
    pub r_after: usize,
    /// Nodes overtaken: `r_before − r_after`. May be negative.
    pub rho: i64,
    /// Percentage betweenness after the insertions, absent when `n < 3`.
    pub pct_betweenness: Option<f64>,
    /// Percentage rank after the insertions.
    pub pct_rank: f64,
}

pub fn rank_report(g_before: &Graph, g_after: &Graph, v: NodeId) -> Result<RankReport> {
    let n = g_before.node_count();
    if g_after.node_count() != n {
        return Err(Error::Argument(format!(
            "node sets differ: {n} vs {} nodes",
            g_after.node_count()
        )));
    }
    check_target(g_before, v)?;
    let before = brandes_all(g_before)?;
    let after = brandes_all(g_after)?;
    Ok(report_from_scores(&before, &after, v))
}

/// [`rank_report`] from precomputed score tables.
pub fn report_from_scores(before: &[f64], after: &[f64], v: NodeId) -> RankReport {
    let n = before.len();
    let r_before = rank_of(before, v);
    let r_after = rank_of(after, v);
    RankReport {
        b_before: before[v],
        b_after: after[v],
        r_before,
        r_after,
        rho: r_before as i64 - r_after as i64,
        pct_betweenness: percentage_betweenness(after[v], n),
        pct_rank: percentage_rank(r_after, n),
    }
}

/// Stratified pivot sample: nodes sorted by rank (ties by id) are cut into
/// four intervals of `⌈n/4⌉` and an equal share of `count` is drawn uniformly
/// from each, earlier intervals taking the remainder.
pub fn sample_pivots(b: &[f64], count: usize, seed: u64) -> Vec<NodeId> {
    let n = b.len();
    if n == 0 || count == 0 {
        return Vec::new();
    }
    let r = ranks(b);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|&u| (r[u], u));
    let width = n.div_ceil(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count.min(n));
    for (i, interval) in order.chunks(width).enumerate() {
        let share = count / 4 + usize::from(i < count % 4);
        out.extend(
            interval
                .choose_multiple(&mut rng, share.min(interval.len()))
                .copied(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_pa;

    fn star_instance() -> Graph {
        Graph::from_edges(5, true, &[(3, 4)]).unwrap()
    }

    #[test]
    fn greedy_symmetric_candidates() {
        let sol = greedy_mbi(&star_instance(), 3, 2).unwrap();
        assert_eq!(sol.edges, vec![(0, 3), (1, 3)]);
        assert_eq!(sol.trace, vec![1.0, 2.0]);
    }

    #[test]
    fn greedy_zero_rounds() {
        let sol = greedy_mbi(&star_instance(), 3, 0).unwrap();
        assert!(sol.edges.is_empty() && sol.trace.is_empty());
        assert_eq!(sol.final_betweenness(), 0.0);
    }

    #[test]
    fn greedy_exhausts_candidates() {
        let sol = greedy_mbi(&star_instance(), 3, 10).unwrap();
        assert_eq!(sol.tails(), vec![0, 1, 2, 4]);
        assert_eq!(sol.trace, vec![1.0, 2.0, 3.0, 3.0]);
    }

    #[test]
    fn greedy_k1_is_optimal() {
        let g = generate_pa(20, 1, 5).unwrap();
        for v in [0, 7, 19] {
            let greedy = greedy_mbi(&g, v, 1).unwrap();
            let opt = brute_force_optimum(&g, v, 1).unwrap();
            assert!((greedy.final_betweenness() - opt.final_betweenness()).abs() <= 1e-9);
        }
    }

    #[test]
    fn threads_do_not_change_result() {
        let g = generate_pa(60, 2, 3).unwrap();
        let a = greedy_mbi_with(&g, 40, 3, GreedyOptions { threads: 1 }).unwrap();
        let b = greedy_mbi_with(&g, 40, 3, GreedyOptions { threads: 4 }).unwrap();
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn pruned_matches_plain() {
        let g = generate_pa(80, 1, 9).unwrap();
        let plain = greedy_mbi(&g, 50, 4).unwrap();
        let pruned = greedy_mbi_pruned(&g, 50, 4).unwrap();
        assert!((plain.final_betweenness() - pruned.final_betweenness()).abs() <= 1e-9);
        assert!(pruned.evaluations <= plain.evaluations);
        let one = greedy_mbi_pruned(&g, 50, 1).unwrap();
        assert_eq!(one.edges, greedy_mbi(&g, 50, 1).unwrap().edges);
    }

    #[test]
    fn pruned_rejects_undirected() {
        let g = Graph::from_edges(3, false, &[(0, 1)]).unwrap();
        assert!(matches!(
            greedy_mbi_pruned(&g, 0, 1),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn brute_force_small() {
        let sol = brute_force_optimum(&star_instance(), 3, 2).unwrap();
        assert_eq!(sol.tails(), vec![0, 1]);
        assert_eq!(sol.final_betweenness(), 2.0);
        assert_eq!(sol.evaluations, 6);

        let all = brute_force_optimum(&star_instance(), 3, 7).unwrap();
        assert_eq!(all.tails(), vec![0, 1, 2, 4]);
        assert_eq!(all.evaluations, 1);
    }

    #[test]
    fn brute_force_budget() {
        let g = Graph::new(40, true, false);
        match brute_force_optimum_with_budget(&g, 0, 5, 1000) {
            Err(Error::Capacity(msg)) => assert!(msg.contains("C(39, 5)")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn baselines() {
        let g = star_instance();
        let sol = baseline(&g, 3, 2, BaselineKind::TopDegree).unwrap();
        assert_eq!(sol.tails(), vec![0, 1]);
        let a = baseline(&g, 3, 2, BaselineKind::Random { seed: 3 }).unwrap();
        let b = baseline(&g, 3, 2, BaselineKind::Random { seed: 3 }).unwrap();
        assert_eq!(a.edges, b.edges);
        let g = generate_pa(40, 1, 2).unwrap();
        let sol = baseline(&g, 30, 3, BaselineKind::TopBetweenness).unwrap();
        assert_eq!(sol.trace, static_trace(&g, 30, &sol.edges).unwrap());
    }

    #[test]
    fn rank_report_cases() {
        let g = Graph::from_edges(4, true, &[(0, 1), (1, 2)]).unwrap();
        let r = rank_report(&g, &g, 1).unwrap();
        assert_eq!(r.rho, 0);
        assert_eq!(r.r_before, 1);

        let r = report_from_scores(&[2.0, 1.0, 0.0, 0.0], &[2.0, 3.0, 0.0, 0.0], 1);
        assert_eq!((r.r_before, r.r_after, r.rho), (2, 1, 1));
        assert_eq!(r.pct_rank, 25.0);
        assert_eq!(r.pct_betweenness, Some(50.0));

        let tiny = Graph::from_edges(2, true, &[(0, 1)]).unwrap();
        assert_eq!(rank_report(&tiny, &tiny, 0).unwrap().pct_betweenness, None);
    }

    #[test]
    fn pivots_cover_each_quartile() {
        let b: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let pivots = sample_pivots(&b, 8, 1);
        assert_eq!(pivots.len(), 8);
        // Rank order is reversed id order; two pivots per block of five.
        for block in 0..4 {
            let lo = 20 - 5 * (block + 1);
            let hits = pivots.iter().filter(|&&p| p >= lo && p < lo + 5).count();
            assert_eq!(hits, 2);
        }
        assert_eq!(pivots, sample_pivots(&b, 8, 1));
    }
}
