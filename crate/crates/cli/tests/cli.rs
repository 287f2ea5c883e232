use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mbi_core::graph::load_edge_list;
use serde_json::Value;
use tempfile::TempDir;

fn mbi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbi"))
        .args(args)
        .env_remove("BC_MEM_CAP_MB")
        .output()
        .expect("spawn mbi")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn write_path(dir: &Path) -> PathBuf {
    let p = dir.join("path.tsv");
    fs::write(&p, "0 1\n1 2\n2 3\n").unwrap();
    p
}

#[test]
fn bc_single_node() {
    let dir = TempDir::new().unwrap();
    let g = write_path(dir.path());
    let v = json(&mbi(&[
        "bc",
        "--graph",
        g.to_str().unwrap(),
        "--directed",
        "--node",
        "1",
    ]));
    assert_eq!(v["node"], "1");
    assert_eq!(v["betweenness"], 2.0);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bc_csv_lists_every_node() {
    let dir = TempDir::new().unwrap();
    let g = write_path(dir.path());
    let text = stdout(&mbi(&[
        "bc",
        "--graph",
        g.to_str().unwrap(),
        "--directed",
        "--format",
        "csv",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "node,betweenness");
    assert_eq!(lines.len(), 5);
    assert!(lines.contains(&"2,2.0"));
}

#[test]
fn bc_input_errors() {
    let out = mbi(&["bc", "--graph", "/nonexistent/graph.tsv", "--directed"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "0 1\n0 x\n").unwrap();
    let out = mbi(&["bc", "--graph", bad.to_str().unwrap(), "--directed"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let g = write_path(dir.path());
    let out = mbi(&[
        "bc",
        "--graph",
        g.to_str().unwrap(),
        "--directed",
        "--node",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn improve_zero_steps() {
    let v = json(&mbi(&[
        "improve", "--gen", "pa:30:1", "--target", "12", "--k", "0",
    ]));
    let pivot = &v["pivots"][0];
    assert_eq!(pivot["steps"].as_array().unwrap().len(), 0);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn improve_is_reproducible() {
    let args = [
        "improve", "--gen", "pa:80:2", "--pivots", "4", "--k", "3", "--algo", "random", "--seed",
        "7",
    ];
    let a = stdout(&mbi(&args));
    let b = stdout(&mbi(&args));
    assert_eq!(a, b);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let text = stdout(&mbi(&csv_args));
    assert!(text.starts_with("pivot,step,edge_tail,edge_head,b_v,pct_b,rank,pct_rank,rho,ms\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 3);
}

#[test]
fn improve_ratio_against_oracle() {
    let v = json(&mbi(&[
        "improve",
        "--gen",
        "er:12:0.15",
        "--seed",
        "3",
        "--pivots",
        "4",
        "--k",
        "2",
        "--with-oracle",
    ]));
    for pivot in v["pivots"].as_array().unwrap() {
        assert!(pivot["ratio"].as_f64().unwrap() >= 0.632);
    }
}

#[test]
fn improve_threads_match_serial() {
    let base = [
        "improve", "--gen", "pa:120:2", "--seed", "1", "--pivots", "2", "--k", "3",
    ];
    let serial = stdout(&mbi(&base));
    let mut par = base.to_vec();
    par.extend(["--threads", "3"]);
    assert_eq!(serial, stdout(&mbi(&par)));
}

#[test]
fn improve_timing_is_opt_in() {
    let v = json(&mbi(&[
        "improve", "--gen", "pa:40:1", "--target", "20", "--k", "2",
    ]));
    assert!(v["pivots"][0]["steps"][0]["ms"].is_null());
    let v = json(&mbi(&[
        "improve", "--gen", "pa:40:1", "--target", "20", "--k", "2", "--timing",
    ]));
    assert!(v["pivots"][0]["steps"][0]["ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn improve_domain_errors() {
    let out = mbi(&[
        "improve",
        "--gen",
        "pa:30:1",
        "--undirected",
        "--target",
        "3",
        "--k",
        "1",
        "--algo",
        "greedy-pruned",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("directed"));

    let out = mbi(&[
        "improve",
        "--gen",
        "er:60:0.05",
        "--target",
        "0",
        "--k",
        "5",
        "--algo",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("subsets"));
}

#[test]
fn bench_single_trial() {
    let dir = TempDir::new().unwrap();
    let g = write_path(dir.path());
    let v = json(&mbi(&[
        "update-bench",
        "--graph",
        g.to_str().unwrap(),
        "--directed",
        "--trials",
        "1",
        "--seed",
        "5",
    ]));
    let trials = v["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 1);
    assert_eq!(trials[0]["equiv"], "ok");
    assert!(trials[0]["speedup"].as_f64().unwrap() > 0.0);
}

#[test]
fn bench_edges_follow_seed() {
    let args = [
        "update-bench",
        "--gen",
        "er:40:0.08",
        "--trials",
        "6",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let edges = |text: String| -> Vec<String> {
        text.lines()
            .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(","))
            .collect()
    };
    let a = edges(stdout(&mbi(&args)));
    assert_eq!(a[0], "trial,tail,head");
    assert_eq!(a.len(), 7);
    assert_eq!(a, edges(stdout(&mbi(&args))));
}

#[test]
fn bench_complete_graph() {
    let out = mbi(&["update-bench", "--gen", "er:5:1", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complete"));
}

#[test]
fn memory_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mbi"))
        .args(["update-bench", "--gen", "pa:300:1", "--trials", "1"])
        .env("BC_MEM_CAP_MB", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
}

#[test]
fn gen_outputs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    for p in [&a, &b] {
        stdout(&mbi(&[
            "gen",
            "--gen",
            "pa:10:1",
            "--seed",
            "4",
            "--out",
            p.to_str().unwrap(),
        ]));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let loaded = load_edge_list(text.as_bytes(), true, false).unwrap();
    assert_eq!(loaded.graph.node_count(), 10);

    let text = stdout(&mbi(&["gen", "--gen", "er:4:1"]));
    assert_eq!(text.lines().count(), 12);

    let out = mbi(&["gen", "--gen", "ba:4:1"]);
    assert_eq!(out.status.code(), Some(2));
}
