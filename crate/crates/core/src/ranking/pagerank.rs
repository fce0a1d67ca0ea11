//! Weighted PageRank and indegree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RankingError;
use crate::chronology::{Edge, PeopleGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankParams {
    pub damping: f64,
    pub epsilon: f64,
    pub max_iter: u32,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            epsilon: 1e-10,
            max_iter: 200,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<(), RankingError> {
        let ok = self.damping > 0.0
            && self.damping < 1.0
            && self.epsilon > 0.0
            && self.epsilon.is_finite()
            && self.max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(RankingError::InvalidParams(*self))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    /// Scores by node position; they sum to 1.
    pub scores: Vec<f64>,
    pub iterations: u32,
    /// False when `max_iter` sweeps ran without reaching `epsilon`.
    pub converged: bool,
}

/// PageRank of a people graph, transitions proportional to edge weight.
pub fn pagerank(graph: &PeopleGraph, params: &PageRankParams) -> Result<PageRankResult, RankingError> {
    pagerank_edges(graph.node_count(), graph.edges(), params)
}

/// PageRank over `n` nodes and arbitrary weighted edges; parallel edges add
/// up, zero-weight edges are ignored.
///
/// Dangling nodes spread their mass uniformly. Iteration stops once the L1
/// change of a sweep drops below `epsilon`.
pub fn pagerank_edges(n: usize, edges: &[Edge], params: &PageRankParams) -> Result<PageRankResult, RankingError> {
    params.validate()?;
    if n == 0 {
        return Err(RankingError::EmptyGraph);
    }
    let mut out_weight = vec![0u64; n];
    for e in edges {
        if e.src >= n || e.dst >= n {
            return Err(RankingError::EdgeOutOfBounds { src: e.src, dst: e.dst, n });
        }
        out_weight[e.src] += e.weight;
    }
    // In-edges grouped by destination, each carrying its transition probability.
    let mut offsets = vec![0usize; n + 1];
    for e in edges.iter().filter(|e| e.weight > 0) {
        offsets[e.dst + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut incoming = vec![(0usize, 0f64); offsets[n]];
    for e in edges.iter().filter(|e| e.weight > 0) {
        incoming[fill[e.dst]] = (e.src, e.weight as f64 / out_weight[e.src] as f64);
        fill[e.dst] += 1;
    }
    let dangling: Vec<usize> = (0..n).filter(|&i| out_weight[i] == 0).collect();

    let d = params.damping;
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        let dangling_mass: f64 = dangling.iter().map(|&i| rank[i]).sum();
        let base = (1.0 - d) / nf + d * dangling_mass / nf;
        next.par_iter_mut().enumerate().for_each(|(v, slot)| {
            let inflow: f64 = incoming[offsets[v]..offsets[v + 1]]
                .iter()
                .map(|&(u, p)| rank[u] * p)
                .sum();
            *slot = base + d * inflow;
        });
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < params.epsilon {
            converged = true;
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    for r in &mut rank {
        *r /= total;
    }
    Ok(PageRankResult {
        scores: rank,
        iterations,
        converged,
    })
}

/// Number of distinct in-neighbors of each node.
pub fn indegree(graph: &PeopleGraph) -> Vec<u32> {
    indegree_edges(graph.node_count(), graph.edges())
}

pub fn indegree_edges(n: usize, edges: &[Edge]) -> Vec<u32> {
    let mut pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.dst, e.src)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut out = vec![0u32; n];
    for (dst, _) in pairs {
        out[dst] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: usize, dst: usize, weight: u64) -> Edge {
        Edge { src, dst, weight }
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn symmetric_pairs_and_cycles() {
        let p = PageRankParams::default();
        let two = pagerank_edges(2, &[e(0, 1, 1), e(1, 0, 1)], &p).unwrap();
        assert!(close(&two.scores, &[0.5, 0.5], 1e-12));
        let cycle = pagerank_edges(3, &[e(0, 1, 1), e(1, 2, 1), e(2, 0, 1)], &p).unwrap();
        assert!(close(&cycle.scores, &[1.0 / 3.0; 3], 1e-12));
        assert!(cycle.converged);
    }

    #[test]
    fn dangling_star_closed_form() {
        // A->B, C->B with B dangling. Stationary equations solved by hand:
        // a = c = (1-d)/3 + d*b/3, b = a + d*(a + c).
        let d = 0.85;
        let p = PageRankParams { damping: d, epsilon: 1e-15, max_iter: 1000 };
        let r = pagerank_edges(3, &[e(0, 1, 1), e(2, 1, 1)], &p).unwrap();
        let a = r.scores[0];
        assert!((r.scores[1] - (a + 2.0 * d * a)).abs() < 1e-12);
        assert!((a - r.scores[2]).abs() < 1e-15);
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors_and_non_convergence() {
        let p = PageRankParams::default();
        assert!(matches!(pagerank_edges(0, &[], &p), Err(RankingError::EmptyGraph)));
        let bad = PageRankParams { damping: 1.0, ..p };
        assert!(pagerank_edges(1, &[], &bad).is_err());
        let short = PageRankParams { max_iter: 1, epsilon: 1e-300, ..p };
        let r = pagerank_edges(3, &[e(0, 1, 1), e(2, 1, 1)], &short).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn indegree_counts_distinct_sources() {
        assert_eq!(indegree_edges(3, &[e(0, 1, 5), e(2, 1, 1)]), [0, 2, 0]);
        assert_eq!(indegree_edges(2, &[e(0, 1, 5), e(0, 1, 2)]), [0, 1]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = (usize, Vec<Edge>)> {
            (1usize..15).prop_flat_map(|n| {
                let edge = (0..n, 0..n, 1u64..10).prop_map(|(src, dst, weight)| Edge { src, dst, weight });
                (Just(n), proptest::collection::vec(edge, 0..40))
            })
        }

        proptest! {
            #[test]
            fn scores_form_a_distribution((n, edges) in arb_graph(), d in 0.0f64..0.99) {
                let params = PageRankParams { damping: d, ..PageRankParams::default() };
                let r = pagerank_edges(n, &edges, &params).unwrap();
                prop_assert_eq!(r.scores.len(), n);
                prop_assert!((r.scores.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                // Teleportation alone gives every node at least (1-d)/n.
                let floor = (1.0 - d) / n as f64;
                prop_assert!(r.scores.iter().all(|&s| s >= floor - 1e-12));
            }

            #[test]
            fn edge_order_is_irrelevant((n, mut edges) in arb_graph()) {
                let a = pagerank_edges(n, &edges, &PageRankParams::default()).unwrap();
                edges.reverse();
                let b = pagerank_edges(n, &edges, &PageRankParams::default()).unwrap();
                prop_assert!(close(&a.scores, &b.scores, 1e-12));
            }
        }
    }
}
