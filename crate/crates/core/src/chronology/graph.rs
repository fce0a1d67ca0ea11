//! Lifetime-overlap people graph and per-year slices.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::year::{lifespans_overlap, Lifespan, Year, SLICE_MAX, SLICE_MIN};
use super::ChronologyError;
use crate::gender::Gender;
use crate::ingest::PeopleIndex;

/// A person node of a [`PeopleGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonNode {
    pub title: String,
    pub lifespan: Lifespan,
    #[serde(default)]
    pub gender: Gender,
    #[serde(default)]
    pub categories: Vec<String>,
}

impl PersonNode {
    pub fn new(title: impl Into<String>, lifespan: Lifespan) -> Self {
        Self {
            title: title.into(),
            lifespan,
            gender: Gender::Unknown,
            categories: Vec::new(),
        }
    }
}

/// Directed edge `src -> dst` weighted by mention count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: u64,
}

/// Directed mention graph over dated persons.
///
/// Nodes are sorted by title and edges by `(src, dst)`; every edge joins two
/// persons whose lifespans overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphParts")]
pub struct PeopleGraph {
    nodes: Vec<PersonNode>,
    edges: Vec<Edge>,
    /// Inclusive year range the graph describes; `None` for the all-time graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    years: Option<(Year, Year)>,
}

#[derive(Deserialize)]
struct GraphParts {
    nodes: Vec<PersonNode>,
    edges: Vec<Edge>,
    #[serde(default)]
    years: Option<(Year, Year)>,
}

impl TryFrom<GraphParts> for PeopleGraph {
    type Error = ChronologyError;

    fn try_from(p: GraphParts) -> Result<Self, Self::Error> {
        let mut g = PeopleGraph::from_parts(p.nodes, p.edges)?;
        g.years = p.years;
        Ok(g)
    }
}

impl PeopleGraph {
    /// Builds a graph from explicit parts, checking every invariant.
    ///
    /// Nodes may come in any order; edges refer to positions in `nodes` as
    /// given and are re-indexed after sorting.
    pub fn from_parts(nodes: Vec<PersonNode>, edges: Vec<Edge>) -> Result<Self, ChronologyError> {
        let invalid = |m: String| Err(ChronologyError::InvalidGraph(m));
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].title.cmp(&nodes[b].title));
        let mut position = vec![0usize; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        for w in order.windows(2) {
            if nodes[w[0]].title == nodes[w[1]].title {
                return invalid(format!("duplicate node {:?}", nodes[w[0]].title));
            }
        }
        let mut remapped = Vec::with_capacity(edges.len());
        for e in &edges {
            if e.src >= nodes.len() || e.dst >= nodes.len() {
                return invalid(format!("edge {e:?} out of bounds"));
            }
            if e.src == e.dst {
                return invalid(format!("self edge on {:?}", nodes[e.src].title));
            }
            if e.weight == 0 {
                return invalid(format!("zero weight edge {e:?}"));
            }
            if !lifespans_overlap(&nodes[e.src].lifespan, &nodes[e.dst].lifespan) {
                return invalid(format!(
                    "edge {:?} -> {:?} joins non-overlapping lifespans",
                    nodes[e.src].title, nodes[e.dst].title
                ));
            }
            remapped.push(Edge {
                src: position[e.src],
                dst: position[e.dst],
                weight: e.weight,
            });
        }
        remapped.sort_unstable();
        for w in remapped.windows(2) {
            if (w[0].src, w[0].dst) == (w[1].src, w[1].dst) {
                return invalid(format!("parallel edges {:?}", w[0]));
            }
        }
        let mut slots: Vec<Option<PersonNode>> = nodes.into_iter().map(Some).collect();
        let nodes = order.iter().map(|&i| slots[i].take().expect("each slot once")).collect();
        Ok(Self {
            nodes,
            edges: remapped,
            years: None,
        })
    }

    pub fn nodes(&self) -> &[PersonNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn years(&self) -> Option<(Year, Year)> {
        self.years
    }

    pub fn title(&self, node: usize) -> &str {
        &self.nodes[node].title
    }

    /// Node position of a title.
    pub fn position(&self, title: &str) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.title.as_str().cmp(title))
            .ok()
    }

    /// `(src title, dst title, weight)` triples in edge order.
    pub fn edge_titles(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.edges
            .iter()
            .map(|e| (self.title(e.src), self.title(e.dst), e.weight))
    }
}

/// Builds the all-time graph: one edge per resolved link between dated
/// persons whose lifespans overlap, weighted by mention count.
pub fn build_full_graph(index: &PeopleIndex) -> PeopleGraph {
    let dated: Vec<_> = index
        .persons()
        .filter_map(|p| p.lifespan.map(|l| (p, l)))
        .collect();
    let position: HashMap<&str, usize> = dated
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (p.title.as_str(), i))
        .collect();
    let edges: Vec<Edge> = dated
        .par_iter()
        .enumerate()
        .flat_map_iter(|(src, (person, span))| {
            let position = &position;
            let dated = &dated;
            person.links.iter().filter_map(move |link| {
                let dst = *position.get(link.target.as_str())?;
                (dst != src && lifespans_overlap(span, &dated[dst].1)).then_some(Edge {
                    src,
                    dst,
                    weight: u64::from(link.count),
                })
            })
        })
        .collect();
    let nodes = dated
        .iter()
        .map(|(p, l)| PersonNode {
            title: p.title.clone(),
            lifespan: *l,
            gender: p.gender.gender,
            categories: p.categories.clone(),
        })
        .collect();
    // Index persons iterate in title order and links are sorted by target,
    // so nodes and edges are already canonical.
    let mut edges = edges;
    edges.sort_unstable();
    PeopleGraph {
        nodes,
        edges,
        years: None,
    }
}

/// The subgraph of persons alive in `year` and the edges among them.
pub fn build_slice(graph: &PeopleGraph, year: Year) -> Result<PeopleGraph, ChronologyError> {
    if !year.in_slice_range() {
        return Err(ChronologyError::OutOfRange(year.value()));
    }
    let mut position = vec![usize::MAX; graph.nodes.len()];
    let mut nodes = Vec::new();
    for (i, n) in graph.nodes.iter().enumerate() {
        if n.lifespan.alive_in(year) {
            position[i] = nodes.len();
            nodes.push(n.clone());
        }
    }
    let edges = graph
        .edges
        .iter()
        .filter(|e| position[e.src] != usize::MAX && position[e.dst] != usize::MAX)
        .map(|e| Edge {
            src: position[e.src],
            dst: position[e.dst],
            weight: e.weight,
        })
        .collect();
    Ok(PeopleGraph {
        nodes,
        edges,
        years: Some((year, year)),
    })
}

/// Years from `from` to `to` inclusive, every `step` years, without year zero.
pub fn slice_years(from: Year, to: Year, step: u32) -> Result<Vec<Year>, ChronologyError> {
    if step == 0 {
        return Err(ChronologyError::InvalidStep);
    }
    if from >= to {
        return Err(ChronologyError::InvalidRange { from: from.value(), to: to.value() });
    }
    for y in [from, to] {
        if !y.in_slice_range() {
            return Err(ChronologyError::OutOfRange(y.value()));
        }
    }
    Ok((from.ordinal()..=to.ordinal())
        .step_by(step as usize)
        .map(Year::from_ordinal)
        .collect())
}

/// One slice per grid year, in year order.
pub fn slice_series(
    graph: &PeopleGraph,
    from: Year,
    to: Year,
    step: u32,
) -> Result<Vec<(Year, PeopleGraph)>, ChronologyError> {
    slice_years(from, to, step)?
        .into_par_iter()
        .map(|y| build_slice(graph, y).map(|g| (y, g)))
        .collect()
}

/// The full default grid, 3000 BC to 1950.
pub fn full_slice_range() -> (Year, Year) {
    (
        Year::new(SLICE_MIN).expect("non-zero"),
        Year::new(SLICE_MAX).expect("non-zero"),
    )
}
