//! Simple graphs with optional positive weights.
//!
//! Nodes are contiguous ids `0..n`. Undirected graphs are stored as symmetric
//! digraphs so every shortest-path routine works on ordered pairs. Both
//! adjacency orientations are kept: `out_adj[u]` holds `(v, w)` for every arc
//! `u -> v`, `in_adj[v]` holds `(u, w)` for the same arc.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// An insertion of `(u, v)` with weight `weight`, or a decrease of the weight of
/// an existing arc to `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeUpdate {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

impl EdgeUpdate {
    pub fn new(u: NodeId, v: NodeId, weight: f64) -> Self {
        Self { u, v, weight }
    }

    /// Unit-weight insertion.
    pub fn unit(u: NodeId, v: NodeId) -> Self {
        Self::new(u, v, 1.0)
    }
}

/// What `insert_edge` did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Inserted,
    WeightDecreased,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    directed: bool,
    weighted: bool,
    out_adj: Vec<Vec<(NodeId, f64)>>,
    in_adj: Vec<Vec<(NodeId, f64)>>,
    labels: Vec<String>,
    /// Arcs for directed graphs, edges for undirected ones.
    edges: usize,
}

impl Graph {
    /// A graph with `n` isolated nodes labelled `0..n`.
    pub fn new(n: usize, directed: bool, weighted: bool) -> Self {
        Self {
            directed,
            weighted,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            labels: (0..n).map(|i| i.to_string()).collect(),
            edges: 0,
        }
    }

    /// Builds an unweighted graph from `(u, v)` pairs; fails on self-loops and
    /// duplicates.
    pub fn from_edges(n: usize, directed: bool, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut g = Self::new(n, directed, false);
        for &(u, v) in edges {
            g.insert_edge(EdgeUpdate::unit(u, v))?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    /// Number of arcs (directed) or edges (undirected).
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn out_neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.out_adj[u]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_adj[u].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v].len()
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn arc_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.out_adj[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, wt)| wt)
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.arc_weight(u, v).is_some()
    }

    /// All arcs `(u, v, w)`; undirected edges appear once per orientation.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |&(v, w)| (u, v, w)))
    }

    /// Edges as listed in an edge-list file: every arc for directed graphs,
    /// `u < v` orientation only for undirected graphs.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        let directed = self.directed;
        self.arcs().filter(move |&(u, v, _)| directed || u < v)
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        let n = self.node_count();
        if u >= n {
            return Err(Error::UnknownNode { node: u, n });
        }
        Ok(())
    }

    /// Inserts `e`, or lowers the weight of an existing arc when `e.weight` is
    /// strictly smaller. Undirected graphs gain both orientations.
    pub fn insert_edge(&mut self, e: EdgeUpdate) -> Result<Mutation> {
        self.check_node(e.u)?;
        self.check_node(e.v)?;
        if e.u == e.v {
            return Err(Error::SelfLoop(e.u));
        }
        if !(e.weight.is_finite() && e.weight > 0.0) {
            return Err(Error::Argument(format!(
                "edge weight must be positive and finite, got {}",
                e.weight
            )));
        }
        if !self.weighted && e.weight != 1.0 {
            return Err(Error::Argument(format!(
                "unweighted graph cannot hold weight {}",
                e.weight
            )));
        }

        match self.arc_weight(e.u, e.v) {
            Some(current) if e.weight < current => {
                self.set_weight(e.u, e.v, e.weight);
                if !self.directed {
                    self.set_weight(e.v, e.u, e.weight);
                }
                Ok(Mutation::WeightDecreased)
            }
            Some(current) => Err(Error::Duplicate {
                u: e.u,
                v: e.v,
                weight: current,
                new_weight: e.weight,
            }),
            None => {
                self.push_arc(e.u, e.v, e.weight);
                if !self.directed {
                    self.push_arc(e.v, e.u, e.weight);
                }
                self.edges += 1;
                Ok(Mutation::Inserted)
            }
        }
    }

    fn push_arc(&mut self, u: NodeId, v: NodeId, w: f64) {
        self.out_adj[u].push((v, w));
        self.in_adj[v].push((u, w));
    }

    fn set_weight(&mut self, u: NodeId, v: NodeId, w: f64) {
        for entry in self.out_adj[u].iter_mut().filter(|(x, _)| *x == v) {
            entry.1 = w;
        }
        for entry in self.in_adj[v].iter_mut().filter(|(x, _)| *x == u) {
            entry.1 = w;
        }
    }

    /// Serializes in the edge-list format read by [`load_edge_list`], using
    /// the original labels. Weights are written only for weighted graphs.
    /// Undirected graph on the same nodes and labels with an edge for every
    /// arc, keeping the smaller weight when both orientations exist.
    pub fn to_undirected(&self) -> Graph {
        let mut h = Graph::new(self.node_count(), false, self.weighted);
        h.labels = self.labels.clone();
        for (u, v, w) in self.arcs() {
            match h.arc_weight(u, v) {
                None => {
                    h.insert_edge(EdgeUpdate::new(u, v, w))
                        .expect("arc of a valid graph");
                }
                Some(old) if w < old => {
                    h.insert_edge(EdgeUpdate::new(u, v, w))
                        .expect("arc of a valid graph");
                }
                Some(_) => {}
            }
        }
        h
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            if self.weighted {
                let _ = writeln!(out, "{} {} {}", self.labels[u], self.labels[v], w);
            } else {
                let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
            }
        }
        out
    }
}

/// Result of reading an edge list.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Lines skipped because they were self-loops or repeated edges.
    pub dropped: usize,
}

/// Reads a whitespace-separated edge list. Lines are `u v` or `u v w`; `#`
/// starts a comment. Node ids are unsigned integers, remapped to `0..n` in
/// first-seen order. Self-loops and repeated edges are dropped and counted.
/// A weight column on an unweighted load is validated and ignored.
pub fn load_edge_list<R: BufRead>(
    reader: R,
    directed: bool,
    weighted: bool,
) -> Result<LoadedGraph> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected 2 or 3 fields, found {}", tokens.len()),
            });
        }
        let mut endpoints = [0; 2];
        for (slot, tok) in endpoints.iter_mut().zip(&tokens[..2]) {
            if tok.parse::<u64>().is_err() {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("node id {tok:?} is not a non-negative integer"),
                });
            }
            *slot = *ids.entry((*tok).to_string()).or_insert_with(|| {
                labels.push((*tok).to_string());
                labels.len() - 1
            });
        }
        let weight = match tokens.get(2) {
            Some(tok) => {
                let w: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    reason: format!("weight {tok:?} is not a number"),
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Parse {
                        line: lineno,
                        reason: format!("weight {w} must be positive"),
                    });
                }
                w
            }
            None => 1.0,
        };
        edges.push((
            endpoints[0],
            endpoints[1],
            if weighted { weight } else { 1.0 },
        ));
    }

    let mut graph = Graph::new(labels.len(), directed, weighted);
    graph.labels = labels;
    let mut dropped = 0;
    for (u, v, w) in edges {
        if u == v || graph.has_arc(u, v) {
            dropped += 1;
            continue;
        }
        graph.insert_edge(EdgeUpdate::new(u, v, w))?;
    }
    Ok(LoadedGraph { graph, dropped })
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smallest seed clique used by [`generate_pa`].
pub const PA_MIN_SEED_CLIQUE: usize = 6;

/// Directed preferential attachment.
///
/// The first `max(d + 1, 6)` nodes (capped at `n`) form a complete digraph.
/// Every later node `i` then draws `d` distinct targets among `0..i` with
/// probability proportional to in-degree + 1 and adds arcs `i -> target`.
pub fn generate_pa(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Argument("PA generator needs n > 0".into()));
    }
    if d == 0 {
        return Err(Error::Argument("PA generator needs d >= 1".into()));
    }
    if n < d + 1 {
        return Err(Error::Argument(format!(
            "PA generator needs n >= d + 1 (n={n}, d={d})"
        )));
    }
    let mut rng = rng_for(seed);
    let mut g = Graph::new(n, true, false);
    let clique = (d + 1).max(PA_MIN_SEED_CLIQUE).min(n);
    // One urn entry per node plus one per received arc.
    let mut urn: Vec<NodeId> = Vec::with_capacity(n * (d + 1) + clique * clique);
    for u in 0..clique {
        urn.push(u);
        for v in 0..clique {
            if u != v {
                g.insert_edge(EdgeUpdate::unit(u, v))?;
                urn.push(v);
            }
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(d);
    for i in clique..n {
        chosen.clear();
        while chosen.len() < d {
            let t = urn[rng.gen_range(0..urn.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            g.insert_edge(EdgeUpdate::unit(i, t))?;
            urn.push(t);
        }
        urn.push(i);
    }
    Ok(g)
}

/// Erdős–Rényi G(n, p): every ordered (directed) or unordered (undirected)
/// pair is present independently with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64, directed: bool) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = rng_for(seed);
    let mut g = Graph::new(n, directed, false);
    for u in 0..n {
        let start = if directed { 0 } else { u + 1 };
        for v in start..n {
            if u != v && rng.gen_bool(p) {
                g.insert_edge(EdgeUpdate::unit(u, v))?;
            }
        }
    }
    Ok(g)
}

/// Uniformly random absent arc `(u, v)` with `u != v`, by rejection sampling
/// over ordered pairs. Returns `None` when the graph is complete.
pub fn random_absent_edge<R: Rng>(g: &Graph, rng: &mut R) -> Option<(NodeId, NodeId)> {
    let n = g.node_count();
    let present = if g.is_directed() {
        g.edge_count()
    } else {
        2 * g.edge_count()
    };
    if n < 2 || present >= n * (n - 1) {
        return None;
    }
    loop {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !g.has_arc(u, v) {
            return Some((u, v));
        }
    }
}

/// `k` distinct items from `pool`, uniformly without replacement, in draw order.
pub fn sample_without_replacement(pool: &[NodeId], k: usize, seed: u64) -> Vec<NodeId> {
    let mut rng = rng_for(seed);
    pool.choose_multiple(&mut rng, k.min(pool.len()))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs(g: &Graph) -> Vec<(NodeId, NodeId)> {
        let mut a: Vec<_> = g.arcs().map(|(u, v, _)| (u, v)).collect();
        a.sort_unstable();
        a
    }

    #[test]
    fn undirected_copy_merges_orientations() {
        let g = Graph::from_edges(3, true, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        let h = g.to_undirected();
        assert!(!h.is_directed());
        assert_eq!(h.edge_count(), 2);
        assert!(h.has_arc(2, 1) && h.has_arc(1, 0));
    }

    #[test]
    fn load_directed_path() {
        let g = load_edge_list("0 1\n1 2\n".as_bytes(), true, false)
            .unwrap()
            .graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(arcs(&g), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn load_empty() {
        let loaded = load_edge_list("".as_bytes(), true, false).unwrap();
        assert_eq!(loaded.graph.node_count(), 0);
        assert_eq!(loaded.dropped, 0);
    }

    #[test]
    fn load_drops_duplicates() {
        let loaded = load_edge_list("5 9\n9 5\n5 9\n".as_bytes(), true, false).unwrap();
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.dropped, 1);
        assert_eq!(loaded.graph.labels(), &["5".to_string(), "9".to_string()]);
    }

    #[test]
    fn load_undirected_dedups_reverse() {
        let loaded = load_edge_list("5 9\n9 5\n7 7\n".as_bytes(), false, false).unwrap();
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.dropped, 2);
        assert_eq!(loaded.graph.node_count(), 3);
    }

    #[test]
    fn load_comments_and_weights() {
        let text = "# header\n1 2 0.5 # trailing\n\n2 3 2\n";
        let g = load_edge_list(text.as_bytes(), true, true).unwrap().graph;
        assert_eq!(g.arc_weight(0, 1), Some(0.5));
        assert_eq!(g.arc_weight(1, 2), Some(2.0));
    }

    #[test]
    fn load_errors_name_line() {
        for (text, line) in [
            ("0 1\n1\n", 2),
            ("0 x\n", 1),
            ("0 1\n1 2 -1\n", 2),
            ("0 1 2 3\n", 1),
            ("0 1 0\n", 1),
        ] {
            match load_edge_list(text.as_bytes(), true, true) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn insert_edge_cases() {
        let mut g = Graph::from_edges(3, true, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            g.insert_edge(EdgeUpdate::unit(0, 2)).unwrap(),
            Mutation::Inserted
        );
        assert_eq!(arcs(&g), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(matches!(
            g.insert_edge(EdgeUpdate::unit(1, 1)),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            g.insert_edge(EdgeUpdate::unit(0, 1)),
            Err(Error::Duplicate { .. })
        ));
        assert!(matches!(
            g.insert_edge(EdgeUpdate::unit(0, 7)),
            Err(Error::UnknownNode { .. })
        ));
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn weight_decrease() {
        let mut g = Graph::new(2, false, true);
        g.insert_edge(EdgeUpdate::new(0, 1, 3.0)).unwrap();
        assert_eq!(
            g.insert_edge(EdgeUpdate::new(0, 1, 2.0)).unwrap(),
            Mutation::WeightDecreased
        );
        assert_eq!(g.arc_weight(1, 0), Some(2.0));
        assert_eq!(g.in_neighbors(0), &[(1, 2.0)]);
        assert!(g.insert_edge(EdgeUpdate::new(0, 1, 2.5)).is_err());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn undirected_adjacency_is_symmetric() {
        let g = Graph::from_edges(3, false, &[(0, 1), (2, 1)]).unwrap();
        for u in 0..3 {
            let mut o = g.out_neighbors(u).to_vec();
            let mut i = g.in_neighbors(u).to_vec();
            o.sort_by_key(|a| a.0);
            i.sort_by_key(|a| a.0);
            assert_eq!(o, i);
        }
    }

    #[test]
    fn pa_deterministic_and_degrees() {
        let a = generate_pa(5, 1, 42).unwrap();
        let b = generate_pa(5, 1, 42).unwrap();
        assert_eq!(arcs(&a), arcs(&b));

        let g = generate_pa(50, 2, 7).unwrap();
        let clique = 3.max(PA_MIN_SEED_CLIQUE);
        for u in clique..50 {
            assert_eq!(g.out_degree(u), 2);
        }
    }

    #[test]
    fn pa_matches_small_table_scale() {
        // 100 nodes with out-degree 1 land near 130 arcs.
        let m = generate_pa(100, 1, 1).unwrap().edge_count();
        assert!((115..=145).contains(&m), "m = {m}");
    }

    #[test]
    fn pa_rejects_bad_arguments() {
        assert!(generate_pa(0, 1, 0).is_err());
        assert!(generate_pa(2, 2, 0).is_err());
        assert!(generate_pa(5, 0, 0).is_err());
    }

    #[test]
    fn er_extremes() {
        assert_eq!(generate_er(10, 0.0, 1, true).unwrap().edge_count(), 0);
        assert_eq!(generate_er(4, 1.0, 1, true).unwrap().edge_count(), 12);
        assert_eq!(generate_er(4, 1.0, 1, false).unwrap().edge_count(), 6);
        assert!(generate_er(4, 1.5, 1, true).is_err());
        assert!(generate_er(4, -0.1, 1, true).is_err());
        let a = generate_er(50, 0.1, 7, true).unwrap();
        let b = generate_er(50, 0.1, 7, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn absent_edge_on_complete_graph() {
        let g = generate_er(4, 1.0, 1, true).unwrap();
        assert_eq!(random_absent_edge(&g, &mut rng_for(0)), None);
        let g = Graph::from_edges(3, true, &[(0, 1)]).unwrap();
        let (u, v) = random_absent_edge(&g, &mut rng_for(0)).unwrap();
        assert!(u != v && !g.has_arc(u, v));
    }
}
