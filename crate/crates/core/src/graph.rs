//! Directed graphs in compressed adjacency form.
//!
//! Node ids are dense `0..n`. Both the forward (out-neighbor) and reverse
//! (in-neighbor) adjacency are stored so that in-distance metrics and
//! PageRank can walk predecessors without rebuilding anything.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Comment directive written by [`write_edge_list`] so that isolated nodes
/// survive a save/load cycle.
const NODE_COUNT_DIRECTIVE: &str = "# kdds-nodes:";

/// Identifies a graph by size and arc set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphFingerprint {
    pub node_count: usize,
    pub checksum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

/// What was discarded while building a graph from raw arcs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub duplicate_arcs: usize,
    pub self_loops: usize,
}

impl DirectedGraph {
    /// Builds a graph over `node_count` nodes. Self-loops and repeated arcs
    /// are dropped and counted in the returned stats.
    pub fn from_arcs(
        node_count: usize,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, BuildStats)> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut stats = BuildStats::default();
        let mut pairs = Vec::new();
        for (u, v) in arcs {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfBounds { node, node_count });
                }
            }
            if u == v {
                stats.self_loops += 1;
            } else {
                pairs.push((u, v));
            }
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicate_arcs = before - pairs.len();

        let (out_offsets, out_targets) = compress(node_count, pairs.iter().copied());
        let mut reversed: Vec<_> = pairs.iter().map(|&(u, v)| (v, u)).collect();
        reversed.sort_unstable();
        let (in_offsets, in_sources) = compress(node_count, reversed.into_iter());

        Ok((
            Self {
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
            },
            stats,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count()
    }

    /// Out-neighbors of `v`, sorted ascending.
    pub fn out_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.successors(v))
    }

    /// In-neighbors of `v`, sorted ascending.
    pub fn in_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.predecessors(v))
    }

    /// Unchecked variant of [`Self::out_neighbors`] for hot loops. Panics on
    /// an invalid id.
    #[inline]
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// All arcs in (source, target) lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        let mut hasher = Sha256::new();
        hasher.update((self.node_count() as u64).to_le_bytes());
        for (u, v) in self.arcs() {
            hasher.update((u as u64).to_le_bytes());
            hasher.update((v as u64).to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        GraphFingerprint {
            node_count: self.node_count(),
            checksum: u64::from_le_bytes(head),
        }
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfBounds {
                node: v,
                node_count: self.node_count(),
            })
        }
    }
}

fn compress(
    node_count: usize,
    sorted_pairs: impl Iterator<Item = (NodeId, NodeId)>,
) -> (Vec<usize>, Vec<NodeId>) {
    let mut offsets = vec![0usize; node_count + 1];
    let mut targets = Vec::new();
    for (u, v) in sorted_pairs {
        offsets[u + 1] += 1;
        targets.push(v);
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

/// Maps dense node ids back to the ids used in the source file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
}

impl IdMap {
    pub fn identity(n: usize) -> Self {
        Self {
            original: (0..n as u64).collect(),
        }
    }

    pub fn original(&self, dense: NodeId) -> Option<u64> {
        self.original.get(dense).copied()
    }

    pub fn dense(&self, original: u64) -> Option<NodeId> {
        self.original.binary_search(&original).ok()
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    /// Two-column CSV: `node_id,original_id`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,original_id\n");
        for (dense, orig) in self.original.iter().enumerate() {
            let _ = writeln!(out, "{dense},{orig}");
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub id_map: IdMap,
    pub stats: BuildStats,
}

/// Reads a whitespace-separated `source target` edge list.
///
/// Lines starting with `#` or `%` are comments. Columns after the second are
/// ignored (weights, timestamps). Original ids are remapped to dense ids in
/// ascending numeric order.
pub fn load_edge_list(source: impl BufRead) -> Result<LoadedGraph> {
    let mut raw_arcs = Vec::new();
    let mut declared_nodes: Option<u64> = None;
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(NODE_COUNT_DIRECTIVE) {
            let n = rest.trim().parse::<u64>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad node-count directive: {e}"),
            })?;
            declared_nodes = Some(n);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing {what} node id"),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid {what} node id {token:?}"),
            })
        };
        let u = next_id("source")?;
        let v = next_id("target")?;
        raw_arcs.push((u, v));
    }

    let mut ids: BTreeMap<u64, NodeId> = BTreeMap::new();
    if let Some(n) = declared_nodes {
        for id in 0..n {
            ids.insert(id, 0);
        }
    }
    for &(u, v) in &raw_arcs {
        ids.insert(u, 0);
        ids.insert(v, 0);
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for (dense, slot) in ids.values_mut().enumerate() {
        *slot = dense;
    }
    let arcs = raw_arcs.iter().map(|(u, v)| (ids[u], ids[v]));
    let (graph, stats) = DirectedGraph::from_arcs(ids.len(), arcs)?;
    if stats.duplicate_arcs > 0 || stats.self_loops > 0 {
        warn!(
            "dropped {} duplicate arcs and {} self-loops while loading edge list",
            stats.duplicate_arcs, stats.self_loops
        );
    }
    Ok(LoadedGraph {
        graph,
        id_map: IdMap {
            original: ids.into_keys().collect(),
        },
        stats,
    })
}

/// Writes the graph with dense ids. Reloading the output gives back an
/// identical graph, isolated nodes included.
pub fn write_edge_list(graph: &DirectedGraph, mut sink: impl Write) -> Result<()> {
    writeln!(sink, "{NODE_COUNT_DIRECTIVE} {}", graph.node_count())?;
    for (u, v) in graph.arcs() {
        writeln!(sink, "{u} {v}")?;
    }
    Ok(())
}

/// Directed G(n, p): every ordered pair `(u, v)` with `u != v` gets an arc
/// independently with probability `p`.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(Error::Config("node count must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("arc probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random::<f64>() < p {
                arcs.push((u, v));
            }
        }
    }
    Ok(DirectedGraph::from_arcs(n, arcs)?.0)
}
