//! d-hop influence sets and the k-d dominating set objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Up to `k_limit` distinct seed nodes, kept in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSet {
    nodes: Vec<NodeId>,
    k_limit: usize,
}

impl SeedSet {
    pub fn new(mut nodes: Vec<NodeId>, k_limit: usize, node_count: usize) -> Result<Self> {
        if k_limit == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if nodes.len() > k_limit {
            return Err(Error::Config(format!(
                "{} seeds exceed the limit k = {k_limit}",
                nodes.len()
            )));
        }
        if let Some(&node) = nodes.iter().find(|&&v| v >= node_count) {
            return Err(Error::NodeOutOfBounds { node, node_count });
        }
        nodes.sort_unstable();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate seed node {}", w[0])));
        }
        Ok(Self { nodes, k_limit })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn k_limit(&self) -> usize {
        self.k_limit
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub seed_set: SeedSet,
    pub objective_value: usize,
    pub d: u32,
}

impl Solution {
    pub fn evaluate(graph: &DirectedGraph, seed_set: SeedSet, d: u32) -> Self {
        let objective_value = objective(graph, &seed_set, d);
        Self {
            seed_set,
            objective_value,
            d,
        }
    }
}

/// Reusable BFS scratch. The visited array is generation-stamped so that
/// repeated evaluations never clear or reallocate it.
#[derive(Clone, Debug, Default)]
pub struct CoverageEvaluator {
    stamp: Vec<u32>,
    current: u32,
    frontier: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl CoverageEvaluator {
    pub fn new(node_count: usize) -> Self {
        Self {
            stamp: vec![0; node_count],
            current: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn begin(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.current = 0;
        }
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.fill(0);
            self.current = 1;
        }
    }

    /// Multi-source BFS truncated at depth `d`. Calls `visit` once per
    /// covered node, seeds included.
    fn walk(
        &mut self,
        graph: &DirectedGraph,
        seeds: &[NodeId],
        d: u32,
        mut visit: impl FnMut(NodeId),
    ) {
        self.begin(graph.node_count());
        let mark = self.current;
        self.frontier.clear();
        for &s in seeds {
            if self.stamp[s] != mark {
                self.stamp[s] = mark;
                self.frontier.push(s);
                visit(s);
            }
        }
        for _ in 0..d {
            if self.frontier.is_empty() {
                break;
            }
            self.next.clear();
            for &u in &self.frontier {
                for &v in graph.successors(u) {
                    if self.stamp[v] != mark {
                        self.stamp[v] = mark;
                        self.next.push(v);
                        visit(v);
                    }
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
    }

    /// `|I_d(seeds)|`. Seeds must be valid node ids.
    pub fn coverage(&mut self, graph: &DirectedGraph, seeds: &[NodeId], d: u32) -> usize {
        let mut count = 0;
        self.walk(graph, seeds, d, |_| count += 1);
        count
    }

    pub fn covered(&mut self, graph: &DirectedGraph, seeds: &[NodeId], d: u32) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.walk(graph, seeds, d, |v| out.push(v));
        out.sort_unstable();
        out
    }
}

/// Nodes within directed distance `d` of some seed, ascending. An empty seed
/// set covers nothing.
pub fn influence_set(graph: &DirectedGraph, seeds: &SeedSet, d: u32) -> Vec<NodeId> {
    CoverageEvaluator::new(graph.node_count()).covered(graph, seeds.nodes(), d)
}

pub fn objective(graph: &DirectedGraph, seeds: &SeedSet, d: u32) -> usize {
    CoverageEvaluator::new(graph.node_count()).coverage(graph, seeds.nodes(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_erdos_renyi;

    fn graph(n: usize, arcs: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::from_arcs(n, arcs.iter().copied()).unwrap().0
    }

    fn seeds(nodes: &[usize], n: usize) -> SeedSet {
        SeedSet::new(nodes.to_vec(), nodes.len().max(1), n).unwrap()
    }

    #[test]
    fn path_cases() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(influence_set(&g, &seeds(&[0], 4), 2), vec![0, 1, 2]);
        assert_eq!(objective(&g, &seeds(&[0], 4), 3), 4);
        assert_eq!(objective(&g, &seeds(&[0], 4), 0), 1);
    }

    #[test]
    fn star_covers_everything_in_one_hop() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(influence_set(&g, &seeds(&[0], 4), 1), vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_seed_set_covers_nothing() {
        let g = graph(3, &[(0, 1)]);
        let empty = SeedSet::new(vec![], 2, 3).unwrap();
        assert_eq!(objective(&g, &empty, 2), 0);
        assert!(influence_set(&g, &empty, 2).is_empty());
    }

    #[test]
    fn seed_set_validation() {
        assert!(SeedSet::new(vec![0, 1, 2], 2, 5).is_err());
        assert!(SeedSet::new(vec![0, 9], 2, 5).is_err());
        assert!(SeedSet::new(vec![1, 1], 2, 5).is_err());
        assert!(SeedSet::new(vec![1], 0, 5).is_err());
        assert_eq!(SeedSet::new(vec![3, 1], 2, 5).unwrap().nodes(), &[1, 3]);
    }

    /// Seeds {0, 1}: node 0 reaches 2 and 3 in one hop, 4 and 5 in two,
    /// the remaining 6 and 7 in three.
    #[test]
    fn coverage_strictly_grows_until_full() {
        let g = graph(
            8,
            &[(0, 2), (0, 3), (1, 3), (2, 4), (3, 5), (4, 6), (5, 7)],
        );
        let u = seeds(&[0, 1], 8);
        let f: Vec<_> = (1..=3).map(|d| objective(&g, &u, d)).collect();
        assert!(f[0] < f[1] && f[1] < f[2]);
        assert_eq!(f[2], 8);
    }

    #[test]
    fn evaluator_reuse_matches_fresh() {
        let g = generate_erdos_renyi(40, 0.08, 9).unwrap();
        let mut eval = CoverageEvaluator::new(40);
        for s in 0..40 {
            let set = seeds(&[s, (s * 7 + 3) % 40], 40);
            for d in 0..4 {
                assert_eq!(eval.coverage(&g, set.nodes(), d), objective(&g, &set, d));
            }
        }
    }

    #[test]
    fn stamp_wraparound_is_safe() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let mut eval = CoverageEvaluator::new(3);
        eval.current = u32::MAX - 1;
        for _ in 0..4 {
            assert_eq!(eval.coverage(&g, &[0], 1), 2);
        }
    }
}
