//! Output records. CSV rows and JSON objects share the same field names.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use mbi_core::Result;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct NodeScore {
    pub node: String,
    pub betweenness: f64,
}

#[derive(Serialize)]
pub struct SingleScore<'a> {
    pub schema_version: u32,
    pub node: &'a str,
    pub betweenness: f64,
}

#[derive(Serialize)]
pub struct AllScores<'a> {
    pub schema_version: u32,
    pub nodes: &'a [NodeScore],
}

#[derive(Serialize)]
pub struct StepRecord {
    pub pivot: String,
    pub step: usize,
    pub edge_tail: String,
    pub edge_head: String,
    pub b_v: f64,
    pub pct_b: Option<f64>,
    pub rank: usize,
    pub pct_rank: f64,
    pub rho: i64,
    pub ms: Option<f64>,
}

#[derive(Serialize)]
pub struct PivotReport {
    pub pivot: String,
    pub b_initial: f64,
    pub pct_b_initial: Option<f64>,
    pub rank_initial: usize,
    pub pct_rank_initial: f64,
    pub evaluations: usize,
    /// Final `b_v` over the exhaustive optimum's, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub steps: Vec<StepRecord>,
}

#[derive(Serialize)]
pub struct ImproveReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub algo: String,
    pub k: usize,
    pub seed: u64,
    pub nodes: usize,
    pub pivots: Vec<PivotReport>,
}

#[derive(Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub tail: String,
    pub head: String,
    pub affected_pairs: usize,
    pub si_ms: f64,
    pub static_ms: f64,
    pub speedup: f64,
    pub equiv: &'static str,
}

#[derive(Serialize)]
pub struct BenchSummaryRecord {
    pub mean_si_ms: f64,
    pub std_si_ms: f64,
    pub mean_static_ms: f64,
    pub std_static_ms: f64,
    pub mean_speedup: f64,
    pub geo_mean_speedup: f64,
    pub min_speedup: f64,
    pub max_speedup: f64,
    pub spearman_time_vs_pairs: Option<f64>,
}

#[derive(Serialize)]
pub struct BenchReportRecord {
    pub schema_version: u32,
    pub command: &'static str,
    pub target: String,
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub trials: Vec<TrialRecord>,
    pub summary: BenchSummaryRecord,
}

/// Standard output or a file.
pub fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(sink: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *sink, value).map_err(io::Error::from)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

/// Header line followed by one row per record. The header is written even
/// when there are no rows.
pub fn write_csv<T: Serialize>(sink: &mut dyn Write, header: &[&str], rows: &[T]) -> Result<()> {
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut *sink);
        w.write_record(header).map_err(io::Error::from)?;
        for row in rows {
            w.serialize(row).map_err(io::Error::from)?;
        }
        w.flush()?;
    }
    sink.flush()?;
    Ok(())
}
