//! Leader rankings: PageRank, indegree, categories and in-group shares.

mod labels;
mod pagerank;

use std::io::Write;

use serde::Serialize;

use crate::chronology::PeopleGraph;
use crate::export::format_significant;

pub use labels::{
    categorize, ingroup_fraction, read_labeled_csv, CategoryClass, CategoryRules, InGroupStats,
    LabeledEntry, PersonCategory, SphereRules,
};
pub use pagerank::{indegree, indegree_edges, pagerank, pagerank_edges, PageRankParams, PageRankResult};

#[derive(Debug, thiserror::Error)]
pub enum RankingError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("edge {src} -> {dst} outside a graph of {n} nodes")]
    EdgeOutOfBounds { src: usize, dst: usize, n: usize },
    #[error("invalid PageRank parameters {0:?}")]
    InvalidParams(PageRankParams),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("leader list is empty")]
    EmptyList,
    #[error("invalid rules: {0}")]
    Rules(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Significant digits kept when comparing and printing scores.
pub const SCORE_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingEntry {
    /// Node position in the ranked graph.
    pub node: usize,
    pub title: String,
    pub pagerank: f64,
    pub indegree: u32,
    /// 1-based.
    pub rank: usize,
}

fn quantize(x: f64) -> f64 {
    format_significant(x, SCORE_DIGITS).parse().unwrap_or(x)
}

/// Every node of `graph` in ranking order: PageRank descending (compared at
/// [`SCORE_DIGITS`] significant digits so float noise cannot reorder ties),
/// then indegree descending, then title ascending.
pub fn rank_entries(graph: &PeopleGraph, scores: &[f64], indegrees: &[u32]) -> Vec<RankingEntry> {
    let keys: Vec<f64> = scores.iter().map(|&s| quantize(s)).collect();
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by(|&a, &b| {
        keys[b]
            .total_cmp(&keys[a])
            .then(indegrees[b].cmp(&indegrees[a]))
            .then_with(|| graph.title(a).cmp(graph.title(b)))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(i, node)| RankingEntry {
            node,
            title: graph.title(node).to_string(),
            pagerank: scores[node],
            indegree: indegrees[node],
            rank: i + 1,
        })
        .collect()
}

/// The first `min(k, n)` entries of [`rank_entries`].
pub fn top_k(graph: &PeopleGraph, k: usize, params: &PageRankParams) -> Result<Vec<RankingEntry>, RankingError> {
    if k == 0 {
        return Err(RankingError::ZeroK);
    }
    let pr = pagerank(graph, params)?;
    if !pr.converged {
        log::warn!("PageRank stopped after {} sweeps without converging", pr.iterations);
    }
    let mut entries = rank_entries(graph, &pr.scores, &indegree(graph));
    entries.truncate(k);
    Ok(entries)
}

/// A ranking entry with its optional labels, as written to rankings CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub entry: RankingEntry,
    pub category: Option<CategoryClass>,
    pub in_group: Option<bool>,
}

impl RankedRow {
    pub fn labeled(&self) -> Option<LabeledEntry> {
        Some(LabeledEntry {
            rank: self.entry.rank,
            title: self.entry.title.clone(),
            category: self.category?,
            in_group: self.in_group?,
        })
    }
}

/// Attaches category and in-group labels from the graph's node categories.
pub fn label_entries(
    graph: &PeopleGraph,
    entries: Vec<RankingEntry>,
    categories: Option<&CategoryRules>,
    sphere: Option<&SphereRules>,
) -> Vec<RankedRow> {
    entries
        .into_iter()
        .map(|entry| {
            let cats = &graph.nodes()[entry.node].categories;
            RankedRow {
                category: categories.map(|r| r.classify(cats).class),
                in_group: sphere.map(|s| s.is_in_group(cats)),
                entry,
            }
        })
        .collect()
}

/// Writes `rank,title,pagerank,indegree,category,ingroup`; missing labels
/// are left empty.
pub fn write_rankings_csv<W: Write>(rows: &[RankedRow], out: W) -> Result<(), RankingError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "title", "pagerank", "indegree", "category", "ingroup"])?;
    for r in rows {
        w.write_record([
            r.entry.rank.to_string(),
            r.entry.title.clone(),
            format_significant(r.entry.pagerank, SCORE_DIGITS),
            r.entry.indegree.to_string(),
            r.category.map(|c| c.as_str().to_string()).unwrap_or_default(),
            r.in_group.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
