//! Per-node centrality metrics: in/out degree, harmonic closeness, Brandes
//! betweenness and PageRank, each min-max normalized to `[0, 1]`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphFingerprint, NodeId};

pub const METRIC_COUNT: usize = 5;

/// Column order used everywhere: metric tables, prompts, alpha/beta vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    InDegree,
    OutDegree,
    Closeness,
    Betweenness,
    Pagerank,
}

impl Metric {
    pub const ALL: [Metric; METRIC_COUNT] = [
        Metric::InDegree,
        Metric::OutDegree,
        Metric::Closeness,
        Metric::Betweenness,
        Metric::Pagerank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::InDegree => "in_degree",
            Metric::OutDegree => "out_degree",
            Metric::Closeness => "closeness",
            Metric::Betweenness => "betweenness",
            Metric::Pagerank => "pagerank",
        }
    }
}

pub type MetricRow = [f64; METRIC_COUNT];

/// Which BFS direction closeness uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosenessMode {
    /// Distances from the node to everything it reaches.
    #[default]
    HarmonicOut,
    /// Distances from everything that reaches the node.
    HarmonicIn,
}

impl FromStr for ClosenessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic-out" => Ok(Self::HarmonicOut),
            "harmonic-in" => Ok(Self::HarmonicIn),
            other => Err(Error::Config(format!("unknown closeness mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub closeness: ClosenessMode,
    pub pagerank: PageRankConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRank {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    rows: Vec<MetricRow>,
    raw_rows: Vec<MetricRow>,
    graph: Option<GraphFingerprint>,
}

impl MetricsTable {
    /// Normalized rows, one per node.
    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    pub fn raw_rows(&self) -> &[MetricRow] {
        &self.raw_rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fingerprint of the graph these metrics describe, if known.
    pub fn graph_fingerprint(&self) -> Option<GraphFingerprint> {
        self.graph
    }

    pub fn with_graph_fingerprint(mut self, fingerprint: GraphFingerprint) -> Self {
        self.graph = Some(fingerprint);
        self
    }

    /// Normalized values of one metric across all nodes.
    pub fn column(&self, metric: Metric) -> Vec<f64> {
        let idx = metric as usize;
        self.rows.iter().map(|r| r[idx]).collect()
    }

    /// `node_id`, five raw columns, five normalized columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id");
        for m in Metric::ALL {
            let _ = write!(out, ",{}_raw", m.name());
        }
        for m in Metric::ALL {
            let _ = write!(out, ",{}", m.name());
        }
        out.push('\n');
        for (node, (raw, norm)) in self.raw_rows.iter().zip(&self.rows).enumerate() {
            let _ = write!(out, "{node}");
            for v in raw.iter().chain(norm) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Self::to_csv`]. The graph fingerprint is not stored in
    /// the CSV and comes back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut raw_rows = Vec::new();
        let mut rows = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 1 + 2 * METRIC_COUNT {
                return Err(Error::Shape {
                    expected: 1 + 2 * METRIC_COUNT,
                    found: record.len(),
                });
            }
            let mut values = [0.0; 2 * METRIC_COUNT];
            for (slot, field) in values.iter_mut().zip(record.iter().skip(1)) {
                *slot = field.parse().map_err(|_| Error::Parse {
                    line: idx + 2,
                    message: format!("invalid metric value {field:?}"),
                })?;
            }
            let mut raw = [0.0; METRIC_COUNT];
            let mut norm = [0.0; METRIC_COUNT];
            raw.copy_from_slice(&values[..METRIC_COUNT]);
            norm.copy_from_slice(&values[METRIC_COUNT..]);
            raw_rows.push(raw);
            rows.push(norm);
        }
        Ok(Self {
            rows,
            raw_rows,
            graph: None,
        })
    }
}

/// Raw in/out arc counts per node, as `(in_degree, out_degree)`.
pub fn compute_degree_metrics(graph: &DirectedGraph) -> Vec<(f64, f64)> {
    graph
        .nodes()
        .map(|v| (graph.in_degree(v) as f64, graph.out_degree(v) as f64))
        .collect()
}

/// Sources per parallel work unit. Partial sums are combined in chunk order,
/// so results are bit-identical no matter how many threads run.
const SOURCE_CHUNK: usize = 32;

/// Harmonic closeness: `sum_{v reachable, v != u} 1/dist / (n - 1)`.
pub fn compute_closeness(graph: &DirectedGraph, mode: ClosenessMode) -> Vec<f64> {
    let n = graph.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let nodes: Vec<NodeId> = graph.nodes().collect();
    nodes
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut dist = vec![usize::MAX; n];
            let mut queue = VecDeque::new();
            chunk
                .iter()
                .map(|&source| {
                    dist.fill(usize::MAX);
                    dist[source] = 0;
                    queue.clear();
                    queue.push_back(source);
                    let mut total = 0.0;
                    while let Some(u) = queue.pop_front() {
                        let next = match mode {
                            ClosenessMode::HarmonicOut => graph.successors(u),
                            ClosenessMode::HarmonicIn => graph.predecessors(u),
                        };
                        for &v in next {
                            if dist[v] == usize::MAX {
                                dist[v] = dist[u] + 1;
                                total += 1.0 / dist[v] as f64;
                                queue.push_back(v);
                            }
                        }
                    }
                    total / (n - 1) as f64
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// Exact directed betweenness (Brandes), unnormalized, endpoints excluded.
pub fn compute_betweenness(graph: &DirectedGraph) -> Vec<f64> {
    let n = graph.node_count();
    let nodes: Vec<NodeId> = graph.nodes().collect();
    let partials: Vec<Vec<f64>> = nodes
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut scratch = BrandesScratch::new(n);
            let mut acc = vec![0.0; n];
            for &source in chunk {
                scratch.accumulate(graph, source, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    total
}

struct BrandesScratch {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    order: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![usize::MAX; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }

    fn accumulate(&mut self, graph: &DirectedGraph, source: NodeId, acc: &mut [f64]) {
        self.sigma.fill(0.0);
        self.dist.fill(usize::MAX);
        self.delta.fill(0.0);
        self.order.clear();
        self.queue.clear();

        self.sigma[source] = 1.0;
        self.dist[source] = 0;
        self.queue.push_back(source);
        while let Some(u) = self.queue.pop_front() {
            self.order.push(u);
            for &v in graph.successors(u) {
                if self.dist[v] == usize::MAX {
                    self.dist[v] = self.dist[u] + 1;
                    self.queue.push_back(v);
                }
                if self.dist[v] == self.dist[u] + 1 {
                    self.sigma[v] += self.sigma[u];
                }
            }
        }
        // Predecessors on shortest paths are recovered from distances, which
        // avoids storing per-node predecessor lists.
        for &w in self.order.iter().rev() {
            for &v in graph.predecessors(w) {
                if self.dist[v] != usize::MAX && self.dist[v] + 1 == self.dist[w] {
                    self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
                }
            }
            if w != source {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Power-iteration PageRank with uniform teleport. Mass on dangling nodes is
/// spread uniformly. Stops when the L1 change drops below `tol`.
pub fn compute_pagerank(graph: &DirectedGraph, config: &PageRankConfig) -> Result<PageRank> {
    if !(config.damping > 0.0 && config.damping < 1.0) {
        return Err(Error::Config(format!(
            "damping {} not in (0, 1)",
            config.damping
        )));
    }
    if !(config.tol > 0.0) {
        return Err(Error::Config(format!("tolerance {} must be > 0", config.tol)));
    }
    let n = graph.node_count();
    let uniform = 1.0 / n as f64;
    let mut rank = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let dangling: f64 = graph
            .nodes()
            .filter(|&u| graph.out_degree(u) == 0)
            .map(|u| rank[u])
            .sum();
        let base = (1.0 - config.damping) * uniform + config.damping * dangling * uniform;
        for v in graph.nodes() {
            let inflow: f64 = graph
                .predecessors(v)
                .iter()
                .map(|&u| rank[u] / graph.out_degree(u) as f64)
                .sum();
            next[v] = base + config.damping * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    for r in &mut rank {
        *r /= total;
    }
    Ok(PageRank {
        values: rank,
        iterations,
        converged,
    })
}

/// Per-column min-max scaling. A constant column maps to all zeros.
pub fn normalize_metrics(raw: &[MetricRow]) -> Result<MetricsTable> {
    for (row, values) in raw.iter().enumerate() {
        for (column, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Numeric { row, column, value });
            }
        }
    }
    let mut rows = vec![[0.0; METRIC_COUNT]; raw.len()];
    for col in 0..METRIC_COUNT {
        let (lo, hi) = raw
            .iter()
            .map(|r| r[col])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        let span = hi - lo;
        if !(span > 0.0) {
            continue;
        }
        for (out, r) in rows.iter_mut().zip(raw) {
            out[col] = ((r[col] - lo) / span).clamp(0.0, 1.0);
        }
    }
    Ok(MetricsTable {
        rows,
        raw_rows: raw.to_vec(),
        graph: None,
    })
}

/// All five metrics, normalized, tagged with the graph fingerprint.
pub fn compute_metrics(graph: &DirectedGraph, config: &MetricsConfig) -> Result<MetricsTable> {
    let degrees = compute_degree_metrics(graph);
    let closeness = compute_closeness(graph, config.closeness);
    let betweenness = compute_betweenness(graph);
    let pagerank = compute_pagerank(graph, &config.pagerank)?;
    if !pagerank.converged {
        log::warn!(
            "pagerank stopped after {} iterations without reaching tol {}",
            pagerank.iterations,
            config.pagerank.tol
        );
    }
    let raw: Vec<MetricRow> = graph
        .nodes()
        .map(|v| {
            [
                degrees[v].0,
                degrees[v].1,
                closeness[v],
                betweenness[v],
                pagerank.values[v],
            ]
        })
        .collect();
    Ok(normalize_metrics(&raw)?.with_graph_fingerprint(graph.fingerprint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_erdos_renyi;

    fn graph(n: usize, arcs: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::from_arcs(n, arcs.iter().copied()).unwrap().0
    }

    fn path3() -> DirectedGraph {
        graph(3, &[(0, 1), (1, 2)])
    }

    fn star() -> DirectedGraph {
        graph(4, &[(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn degree_cases() {
        let d = compute_degree_metrics(&path3());
        assert_eq!(d, vec![(0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]);
        let complete = generate_erdos_renyi(4, 1.0, 0).unwrap();
        assert!(compute_degree_metrics(&complete)
            .iter()
            .all(|&p| p == (3.0, 3.0)));
    }

    #[test]
    fn degrees_match_recount() {
        let g = generate_erdos_renyi(20, 0.2, 11).unwrap();
        let mut ins = [0usize; 20];
        let mut outs = [0usize; 20];
        for (u, v) in g.arcs() {
            outs[u] += 1;
            ins[v] += 1;
        }
        for (v, (i, o)) in compute_degree_metrics(&g).into_iter().enumerate() {
            assert_eq!((i as usize, o as usize), (ins[v], outs[v]));
        }
    }

    #[test]
    fn closeness_hand_cases() {
        let c = compute_closeness(&star(), ClosenessMode::HarmonicOut);
        assert_eq!(c, vec![1.0, 0.0, 0.0, 0.0]);
        let c = compute_closeness(&path3(), ClosenessMode::HarmonicOut);
        assert!((c[0] - 0.75).abs() < 1e-15);
        assert!((c[1] - 0.5).abs() < 1e-15);
        assert_eq!(c[2], 0.0);
        let c_in = compute_closeness(&path3(), ClosenessMode::HarmonicIn);
        assert!((c_in[2] - 0.75).abs() < 1e-15);
        assert_eq!(c_in[0], 0.0);
    }

    #[test]
    fn betweenness_hand_cases() {
        assert_eq!(compute_betweenness(&path3()), vec![0.0, 1.0, 0.0]);
        let complete = generate_erdos_renyi(4, 1.0, 0).unwrap();
        assert!(compute_betweenness(&complete).iter().all(|&b| b == 0.0));
        // diamond 0->{1,2}->3: two shortest paths share the load
        let diamond = graph(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(compute_betweenness(&diamond), vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn pagerank_symmetric_cases() {
        let complete = generate_erdos_renyi(4, 1.0, 0).unwrap();
        let pr = compute_pagerank(&complete, &PageRankConfig::default()).unwrap();
        assert!(pr.converged);
        assert!(pr.values.iter().all(|&x| (x - 0.25).abs() < 1e-12));
        let two_cycle = graph(2, &[(0, 1), (1, 0)]);
        let pr = compute_pagerank(&two_cycle, &PageRankConfig::default()).unwrap();
        assert!(pr.values.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn pagerank_rejects_bad_config() {
        let g = path3();
        let bad = PageRankConfig {
            damping: 1.0,
            ..Default::default()
        };
        assert!(compute_pagerank(&g, &bad).is_err());
        let bad = PageRankConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(compute_pagerank(&g, &bad).is_err());
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let g = generate_erdos_renyi(30, 0.1, 3).unwrap();
        let cfg = PageRankConfig {
            max_iter: 2,
            tol: 1e-15,
            ..Default::default()
        };
        let pr = compute_pagerank(&g, &cfg).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 2);
        assert!((pr.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_cases() {
        let raw = [
            [2.0, 3.0, 0.0, 0.0, 0.0],
            [4.0, 3.0, 0.0, 0.0, 0.0],
            [6.0, 3.0, 0.0, 0.0, 0.0],
        ];
        let t = normalize_metrics(&raw).unwrap();
        assert_eq!(t.column(Metric::InDegree), vec![0.0, 0.5, 1.0]);
        assert_eq!(t.column(Metric::OutDegree), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        let raw = [[1.0, f64::NAN, 0.0, 0.0, 0.0]];
        assert!(matches!(
            normalize_metrics(&raw),
            Err(Error::Numeric { row: 0, column: 1, .. })
        ));
        let raw = [[1.0, 0.0, f64::INFINITY, 0.0, 0.0]];
        assert!(normalize_metrics(&raw).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = generate_erdos_renyi(15, 0.2, 5).unwrap();
        let t = compute_metrics(&g, &MetricsConfig::default()).unwrap();
        let back = MetricsTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.rows(), t.rows());
        assert_eq!(back.raw_rows(), t.raw_rows());
    }

    #[test]
    fn closeness_mode_parses() {
        assert_eq!(
            "harmonic-in".parse::<ClosenessMode>().unwrap(),
            ClosenessMode::HarmonicIn
        );
        assert!("eigen".parse::<ClosenessMode>().is_err());
    }
}
