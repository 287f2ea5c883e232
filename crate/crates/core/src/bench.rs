//! Update benchmark: random absent arcs are inserted one after another and
//! each incremental update is timed against a full static recomputation of
//! the target's betweenness.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::apsp::{init_apsp, ApspState};
use crate::bc_static::betweenness_of;
use crate::error::{Error, Result};
use crate::graph::{random_absent_edge, EdgeUpdate, Graph, NodeId};
use crate::si_update::{apply_insertion, UpdateStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTrial {
    pub trial: usize,
    pub tail: NodeId,
    pub head: NodeId,
    pub stats: UpdateStats,
    pub si_ms: f64,
    pub static_ms: f64,
    /// The updated state matched a fresh initialization.
    pub equivalent: bool,
}

impl BenchTrial {
    pub fn speedup(&self) -> f64 {
        self.static_ms / self.si_ms.max(1e-6)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub mean_si_ms: f64,
    pub std_si_ms: f64,
    pub mean_static_ms: f64,
    pub std_static_ms: f64,
    pub mean_speedup: f64,
    pub geo_mean_speedup: f64,
    pub min_speedup: f64,
    pub max_speedup: f64,
    /// Spearman correlation between update time and affected pairs.
    pub time_vs_pairs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub target: NodeId,
    pub trials: Vec<BenchTrial>,
    pub summary: BenchSummary,
}

/// Runs `cfg.trials` cumulative insertions on a copy of `g`. Each trial checks
/// the updated state against a fresh initialization and the static value of
/// `b_x`; a mismatch is an [`Error::Invariant`].
pub fn run_update_bench(g: &Graph, x: NodeId, cfg: BenchConfig) -> Result<BenchReport> {
    let mut graph = g.clone();
    let mut st = init_apsp(&graph, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trials = Vec::with_capacity(cfg.trials);

    for trial in 0..cfg.trials {
        let (u, v) = random_absent_edge(&graph, &mut rng)
            .ok_or_else(|| Error::Argument("graph is complete: no absent edge to insert".into()))?;

        let clock = Instant::now();
        let stats = apply_insertion(&mut graph, &mut st, EdgeUpdate::unit(u, v))?;
        let si_ms = clock.elapsed().as_secs_f64() * 1e3;

        let clock = Instant::now();
        let fresh_b = betweenness_of(&graph, x)?;
        let static_ms = clock.elapsed().as_secs_f64() * 1e3;

        check_equivalence(&graph, x, &st, fresh_b, trial)?;
        trials.push(BenchTrial {
            trial,
            tail: u,
            head: v,
            stats,
            si_ms,
            static_ms,
            equivalent: true,
        });
    }
    let summary = summarize(&trials);
    Ok(BenchReport {
        target: x,
        trials,
        summary,
    })
}

fn check_equivalence(
    g: &Graph,
    x: NodeId,
    st: &ApspState,
    fresh_b: f64,
    trial: usize,
) -> Result<()> {
    let fresh = init_apsp(g, x)?;
    if let Some((s, t)) = st.first_difference(&fresh) {
        return Err(Error::Invariant(format!(
            "trial {trial}: updated tables differ from a fresh initialization at ({s}, {t})"
        )));
    }
    if (st.betweenness() - fresh_b).abs() > 1e-9 * fresh_b.abs().max(1.0) {
        return Err(Error::Invariant(format!(
            "trial {trial}: b_x = {} but static recomputation gives {fresh_b}",
            st.betweenness()
        )));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn summarize(trials: &[BenchTrial]) -> BenchSummary {
    let si: Vec<f64> = trials.iter().map(|t| t.si_ms).collect();
    let st: Vec<f64> = trials.iter().map(|t| t.static_ms).collect();
    let speedups: Vec<f64> = trials.iter().map(BenchTrial::speedup).collect();
    let pairs: Vec<f64> = trials
        .iter()
        .map(|t| t.stats.affected_pairs as f64)
        .collect();
    let geo = if speedups.is_empty() {
        0.0
    } else {
        mean(&speedups.iter().map(|s| s.ln()).collect::<Vec<_>>()).exp()
    };
    BenchSummary {
        mean_si_ms: mean(&si),
        std_si_ms: std_dev(&si),
        mean_static_ms: mean(&st),
        std_static_ms: std_dev(&st),
        mean_speedup: mean(&speedups),
        geo_mean_speedup: geo,
        min_speedup: speedups.iter().copied().fold(f64::INFINITY, f64::min),
        max_speedup: speedups.iter().copied().fold(0.0, f64::max),
        time_vs_pairs: spearman(&si, &pairs),
    }
}

/// Ranks starting at 1, tied values sharing their average rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation. `None` for fewer than two points or when
/// either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    if a.len() < 2 {
        return None;
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let (ma, mb) = (mean(&ra), mean(&rb));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}
