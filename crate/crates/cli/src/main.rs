mod report;
mod source;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbi_core::bench::{run_update_bench, BenchConfig};
use mbi_core::graph::sample_without_replacement;
use mbi_core::improve::{
    baseline, brute_force_optimum, greedy_mbi_pruned, greedy_mbi_with, percentage_betweenness,
    percentage_rank, report_from_scores, sample_pivots, BaselineKind, GreedyOptions,
    ImprovementSolution,
};
use mbi_core::{brandes_all, rank_of, EdgeUpdate, Error, Graph, Result};

use report::{Format, SCHEMA_VERSION};
use source::GenSpec;

#[derive(Parser)]
#[command(
    name = "mbi",
    version,
    about = "Betweenness improvement for a single node"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact betweenness of every node, or of one node.
    Bc(BcArgs),
    /// Add k arcs into pivot nodes and track betweenness and rank.
    Improve(ImproveArgs),
    /// Time incremental updates against static recomputation.
    UpdateBench(BenchArgs),
    /// Write a synthetic graph as an edge list.
    Gen(GenArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Direction {
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct BcArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    direction: Direction,
    #[arg(long)]
    weighted: bool,
    /// Report only this node label.
    #[arg(long)]
    node: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Input graph: an edge-list file or a generator string.
#[derive(Args)]
struct GraphSource {
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    graph: Option<PathBuf>,
    /// pa:N:D or er:N:P
    #[arg(long)]
    gen: Option<GenSpec>,
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    #[arg(long)]
    undirected: bool,
    #[arg(long)]
    weighted: bool,
}

impl GraphSource {
    fn build(&self, seed: u64) -> Result<Graph> {
        match (&self.graph, self.gen) {
            (Some(path), _) => {
                if self.directed == self.undirected {
                    return Err(Error::Argument(
                        "pass --directed or --undirected with --graph".into(),
                    ));
                }
                source::load(path, self.directed, self.weighted)
            }
            (None, Some(spec)) => spec.build(seed, !self.undirected),
            (None, None) => Err(Error::Argument("pass --graph or --gen".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Greedy,
    GreedyPruned,
    TopDegree,
    TopBetweenness,
    Random,
    Oracle,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("pivot").required(true).args(["target", "pivots"])))]
struct ImproveArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Label of the single pivot.
    #[arg(long)]
    target: Option<String>,
    /// Number of pivots sampled across rank quartiles.
    #[arg(long)]
    pivots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "greedy")]
    algo: Algo,
    /// Also solve exactly and report the ratio to the optimum.
    #[arg(long)]
    with_oracle: bool,
    /// Candidate evaluation threads for the greedy algorithm.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Fill the wall-time column; output is then no longer reproducible.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node label, or `random`.
    #[arg(long, default_value = "random")]
    target: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// pa:N:D or er:N:P
    #[arg(long)]
    gen: GenSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    undirected: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_bc(args: &BcArgs) -> Result<()> {
    let g = source::load(&args.graph, args.direction.directed, args.weighted)?;
    let scores = brandes_all(&g)?;
    let mut sink = report::open_sink(args.out.as_deref())?;
    let rows: Vec<report::NodeScore> = match &args.node {
        Some(label) => {
            let v = source::node_by_label(&g, label)?;
            vec![report::NodeScore {
                node: label.clone(),
                betweenness: scores[v],
            }]
        }
        None => (0..g.node_count())
            .map(|v| report::NodeScore {
                node: g.label(v).to_string(),
                betweenness: scores[v],
            })
            .collect(),
    };
    match args.format {
        Format::Csv => report::write_csv(&mut *sink, &["node", "betweenness"], &rows),
        Format::Json => {
            if args.node.is_some() {
                let row = &rows[0];
                report::write_json(
                    &mut *sink,
                    &report::SingleScore {
                        schema_version: SCHEMA_VERSION,
                        node: &row.node,
                        betweenness: row.betweenness,
                    },
                )
            } else {
                report::write_json(
                    &mut *sink,
                    &report::AllScores {
                        schema_version: SCHEMA_VERSION,
                        nodes: &rows,
                    },
                )
            }
        }
    }
}

fn solve(g: &Graph, v: usize, args: &ImproveArgs) -> Result<ImprovementSolution> {
    match args.algo {
        Algo::Greedy => greedy_mbi_with(
            g,
            v,
            args.k,
            GreedyOptions {
                threads: args.threads.max(1),
            },
        ),
        Algo::GreedyPruned => greedy_mbi_pruned(g, v, args.k),
        Algo::TopDegree => baseline(g, v, args.k, BaselineKind::TopDegree),
        Algo::TopBetweenness => baseline(g, v, args.k, BaselineKind::TopBetweenness),
        Algo::Random => baseline(g, v, args.k, BaselineKind::Random { seed: args.seed }),
        Algo::Oracle => brute_force_optimum(g, v, args.k),
    }
}

fn cmd_improve(args: &ImproveArgs) -> Result<()> {
    let g = args.source.build(args.seed)?;
    let n = g.node_count();
    let before = brandes_all(&g)?;
    let pivots = match (&args.target, args.pivots) {
        (Some(label), _) => vec![source::node_by_label(&g, label)?],
        (None, Some(count)) => sample_pivots(&before, count, args.seed),
        (None, None) => return Err(Error::Argument("pass --target or --pivots".into())),
    };

    let mut reports = Vec::with_capacity(pivots.len());
    for v in pivots {
        let sol = solve(&g, v, args)?;
        let ratio = if args.with_oracle {
            let best = if args.algo == Algo::Oracle {
                sol.final_betweenness()
            } else {
                brute_force_optimum(&g, v, args.k)?.final_betweenness()
            };
            Some(if best > 0.0 {
                sol.final_betweenness() / best
            } else {
                1.0
            })
        } else {
            None
        };

        let label = g.label(v).to_string();
        let mut steps = Vec::with_capacity(sol.edges.len());
        let mut h = g.clone();
        for (i, &(tail, head)) in sol.edges.iter().enumerate() {
            h.insert_edge(EdgeUpdate::unit(tail, head))?;
            let after = brandes_all(&h)?;
            let r = report_from_scores(&before, &after, v);
            steps.push(report::StepRecord {
                pivot: label.clone(),
                step: i + 1,
                edge_tail: g.label(tail).to_string(),
                edge_head: g.label(head).to_string(),
                b_v: r.b_after,
                pct_b: r.pct_betweenness,
                rank: r.r_after,
                pct_rank: r.pct_rank,
                rho: r.rho,
                ms: args.timing.then(|| sol.elapsed_ms[i]),
            });
        }
        let r0 = rank_of(&before, v);
        reports.push(report::PivotReport {
            pivot: label,
            b_initial: before[v],
            pct_b_initial: percentage_betweenness(before[v], n),
            rank_initial: r0,
            pct_rank_initial: percentage_rank(r0, n),
            evaluations: sol.evaluations,
            ratio,
            steps,
        });
    }

    let mut sink = report::open_sink(args.out.as_deref())?;
    match args.format {
        Format::Csv => {
            let rows: Vec<&report::StepRecord> = reports.iter().flat_map(|p| &p.steps).collect();
            let header = [
                "pivot",
                "step",
                "edge_tail",
                "edge_head",
                "b_v",
                "pct_b",
                "rank",
                "pct_rank",
                "rho",
                "ms",
            ];
            report::write_csv(&mut *sink, &header, &rows)
        }
        Format::Json => {
            let algo = args
                .algo
                .to_possible_value()
                .expect("named variant")
                .get_name()
                .to_string();
            report::write_json(
                &mut *sink,
                &report::ImproveReport {
                    schema_version: SCHEMA_VERSION,
                    command: "improve",
                    algo,
                    k: args.k,
                    seed: args.seed,
                    nodes: n,
                    pivots: reports,
                },
            )
        }
    }
}

fn cmd_update_bench(args: &BenchArgs) -> Result<()> {
    let g = args.source.build(args.seed)?;
    if g.node_count() == 0 {
        return Err(Error::Argument("graph has no nodes".into()));
    }
    let x = if args.target == "random" {
        let all: Vec<usize> = (0..g.node_count()).collect();
        sample_without_replacement(&all, 1, args.seed)[0]
    } else {
        source::node_by_label(&g, &args.target)?
    };
    let bench = run_update_bench(
        &g,
        x,
        BenchConfig {
            trials: args.trials,
            seed: args.seed,
        },
    )?;

    let trials: Vec<report::TrialRecord> = bench
        .trials
        .iter()
        .map(|t| report::TrialRecord {
            trial: t.trial + 1,
            tail: g.label(t.tail).to_string(),
            head: g.label(t.head).to_string(),
            affected_pairs: t.stats.affected_pairs,
            si_ms: t.si_ms,
            static_ms: t.static_ms,
            speedup: t.speedup(),
            equiv: if t.equivalent { "ok" } else { "FAIL" },
        })
        .collect();
    let s = &bench.summary;
    let summary = report::BenchSummaryRecord {
        mean_si_ms: s.mean_si_ms,
        std_si_ms: s.std_si_ms,
        mean_static_ms: s.mean_static_ms,
        std_static_ms: s.std_static_ms,
        mean_speedup: s.mean_speedup,
        geo_mean_speedup: s.geo_mean_speedup,
        min_speedup: s.min_speedup,
        max_speedup: s.max_speedup,
        spearman_time_vs_pairs: s.time_vs_pairs,
    };

    let mut sink = report::open_sink(args.out.as_deref())?;
    match args.format {
        Format::Csv => {
            let header = [
                "trial",
                "tail",
                "head",
                "affected_pairs",
                "si_ms",
                "static_ms",
                "speedup",
                "equiv",
            ];
            report::write_csv(&mut *sink, &header, &trials)?;
            eprintln!(
                "mean SI {:.4} ms (sd {:.4}), mean static {:.3} ms (sd {:.3}); speedup mean {:.1}, geo-mean {:.1}, min {:.1}, max {:.1}",
                s.mean_si_ms,
                s.std_si_ms,
                s.mean_static_ms,
                s.std_static_ms,
                s.mean_speedup,
                s.geo_mean_speedup,
                s.min_speedup,
                s.max_speedup
            );
            Ok(())
        }
        Format::Json => report::write_json(
            &mut *sink,
            &report::BenchReportRecord {
                schema_version: SCHEMA_VERSION,
                command: "update-bench",
                target: g.label(x).to_string(),
                seed: args.seed,
                nodes: g.node_count(),
                edges: g.edge_count(),
                trials,
                summary,
            },
        ),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let g = args.gen.build(args.seed, !args.undirected)?;
    let mut sink = report::open_sink(args.out.as_deref())?;
    sink.write_all(g.to_edge_list().as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bc(a) => cmd_bc(a),
        Command::Improve(a) => cmd_improve(a),
        Command::UpdateBench(a) => cmd_update_bench(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
