//! Co-occurrence network of news topics and its betweenness centrality.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;

use super::{NewsAnchor, WikinewsError};
use crate::export::GraphView;

/// Undirected topic graph; nodes sorted by title, edges stored once with
/// `a < b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NewsGraph {
    nodes: Vec<String>,
    edges: BTreeMap<(usize, usize), u64>,
    adjacency: Vec<Vec<usize>>,
}

impl NewsGraph {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, title: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(title)).ok()
    }

    /// Co-occurrence count of two titles, 0 when unlinked. Symmetric.
    pub fn weight(&self, a: &str, b: &str) -> u64 {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) if i != j => self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// `(a, b, weight)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Sorted neighbor lists.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Builds a graph from titles and undirected edges, merging repeats.
    pub fn from_edges(titles: impl IntoIterator<Item = String>, edges: &[(usize, usize, u64)]) -> Self {
        let titles: Vec<String> = titles.into_iter().collect();
        let mut order: Vec<usize> = (0..titles.len()).collect();
        order.sort_by(|&a, &b| titles[a].cmp(&titles[b]));
        let mut position = vec![0; titles.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut map = BTreeMap::new();
        for &(a, b, w) in edges {
            let (a, b) = (position[a], position[b]);
            if a != b && w > 0 {
                *map.entry((a.min(b), a.max(b))).or_insert(0) += w;
            }
        }
        Self::assemble(order.into_iter().map(|i| titles[i].clone()).collect(), map)
    }

    fn assemble(nodes: Vec<String>, edges: BTreeMap<(usize, usize), u64>) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in edges.keys() {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { nodes, edges, adjacency }
    }

    pub fn to_view(&self) -> GraphView {
        GraphView::new(false, self.nodes.clone(), self.edges().collect())
    }
}

/// Adds a clique over each anchor's links; repeated pairs accumulate.
/// Anchors with a single link contribute an isolated node.
pub fn build_news_network(anchors: &[NewsAnchor]) -> NewsGraph {
    let titles: BTreeSet<&str> = anchors
        .iter()
        .flat_map(|a| a.links.iter().map(String::as_str))
        .collect();
    let nodes: Vec<String> = titles.iter().map(|t| t.to_string()).collect();
    let index = |t: &str| nodes.binary_search_by(|n| n.as_str().cmp(t)).expect("collected above");
    let mut edges = BTreeMap::new();
    for anchor in anchors {
        let mut ids: Vec<usize> = anchor.links.iter().map(|t| index(t)).collect();
        ids.sort_unstable();
        ids.dedup();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                *edges.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    NewsGraph::assemble(nodes, edges)
}

/// Sources handled by one parallel task of [`betweenness`].
const CHUNK: usize = 32;

/// Unnormalized shortest-path betweenness on the unweighted skeleton,
/// each unordered pair counted once.
///
/// Per-source dependency accumulation follows Brandes; chunks of sources
/// run in parallel and their partial sums are added in chunk order, so
/// results do not depend on the thread count.
pub fn betweenness(graph: &NewsGraph) -> Result<Vec<f64>, WikinewsError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(WikinewsError::EmptyGraph);
    }
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut state = Brandes::new(n);
            for &s in chunk {
                state.accumulate(graph, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    for t in &mut total {
        *t /= 2.0;
    }
    Ok(total)
}

struct Brandes {
    stack: Vec<usize>,
    preds: Vec<Vec<usize>>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    queue: VecDeque<usize>,
}

impl Brandes {
    fn new(n: usize) -> Self {
        Self {
            stack: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, graph: &NewsGraph, s: usize, acc: &mut [f64]) {
        self.stack.clear();
        for p in &mut self.preds {
            p.clear();
        }
        self.sigma.fill(0.0);
        self.dist.fill(-1);
        self.delta.fill(0.0);
        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in graph.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        while let Some(w) = self.stack.pop() {
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}
