//! GraphML, DOT and edge-list serialization with stable ordering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use quick_xml::escape::escape;
use serde::{Deserialize, Serialize};

use crate::chronology::PeopleGraph;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot export an empty graph")]
    EmptyGraph,
    #[error("unknown graph format {0:?} (expected graphml, dot or edge_csv)")]
    UnknownFormat(String),
    #[error("attribute {name:?} has {got} values for {nodes} nodes")]
    AttributeLength { name: String, got: usize, nodes: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// removed. Magnitudes below 1e-5 or at least 10^digits use exponent form.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFormat {
    Graphml,
    Dot,
    EdgeCsv,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Graphml => "graphml",
            GraphFormat::Dot => "dot",
            GraphFormat::EdgeCsv => "csv",
        }
    }
}

impl FromStr for GraphFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graphml" => Ok(GraphFormat::Graphml),
            "dot" => Ok(GraphFormat::Dot),
            "edge_csv" | "csv" => Ok(GraphFormat::EdgeCsv),
            other => Err(ExportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Int(i64),
    Double(f64),
    Str(String),
}

impl AttrValue {
    fn graphml_type(&self) -> &'static str {
        match self {
            AttrValue::Int(_) => "long",
            AttrValue::Double(_) => "double",
            AttrValue::Str(_) => "string",
        }
    }

    fn render(&self) -> String {
        match self {
            AttrValue::Int(v) => v.to_string(),
            AttrValue::Double(v) => format_significant(*v, 12),
            AttrValue::Str(s) => s.clone(),
        }
    }
}

/// Format-neutral graph: titled nodes with attributes and weighted edges,
/// nodes sorted by title and edges by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphView {
    pub directed: bool,
    titles: Vec<String>,
    attrs: BTreeMap<String, Vec<Option<AttrValue>>>,
    edges: Vec<(usize, usize, u64)>,
}

impl GraphView {
    pub fn new(directed: bool, titles: Vec<String>, mut edges: Vec<(usize, usize, u64)>) -> Self {
        let mut order: Vec<usize> = (0..titles.len()).collect();
        order.sort_by(|&a, &b| titles[a].cmp(&titles[b]));
        let mut position = vec![0; titles.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        for e in &mut edges {
            e.0 = position[e.0];
            e.1 = position[e.1];
            if !directed && e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_unstable();
        Self {
            directed,
            titles: order.iter().map(|&i| titles[i].clone()).collect(),
            attrs: BTreeMap::new(),
            edges,
        }
    }

    /// A people graph with gender, birth and death node attributes.
    pub fn from_people(graph: &PeopleGraph) -> Self {
        let titles = graph.nodes().iter().map(|n| n.title.clone()).collect();
        let edges = graph.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect();
        let mut view = Self::new(true, titles, edges);
        let nodes = graph.nodes();
        view.attrs.insert(
            "gender".into(),
            nodes.iter().map(|n| Some(AttrValue::Str(n.gender.as_str().into()))).collect(),
        );
        view.attrs.insert(
            "birth".into(),
            nodes.iter().map(|n| Some(AttrValue::Int(n.lifespan.birth.value().into()))).collect(),
        );
        view.attrs.insert(
            "death".into(),
            nodes
                .iter()
                .map(|n| n.lifespan.death.map(|d| AttrValue::Int(d.value().into())))
                .collect(),
        );
        view
    }

    /// Adds a node attribute. `values` is indexed like the sorted titles.
    pub fn set_attr(&mut self, name: &str, values: Vec<Option<AttrValue>>) -> Result<(), ExportError> {
        if values.len() != self.titles.len() {
            return Err(ExportError::AttributeLength {
                name: name.into(),
                got: values.len(),
                nodes: self.titles.len(),
            });
        }
        self.attrs.insert(name.into(), values);
        Ok(())
    }

    pub fn titles(&self) -> &[String] {
        &self.titles
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }
}

/// Serializes `view` in `format`.
pub fn export_graph<W: Write>(view: &GraphView, format: GraphFormat, out: W) -> Result<(), ExportError> {
    if view.titles.is_empty() {
        return Err(ExportError::EmptyGraph);
    }
    let text = match format {
        GraphFormat::Graphml => graphml(view),
        GraphFormat::Dot => dot(view),
        GraphFormat::EdgeCsv => edge_csv(view),
    };
    let mut out = out;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn graphml(view: &GraphView) -> String {
    let mut s = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
    );
    s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    for (name, values) in &view.attrs {
        let ty = values.iter().flatten().next().map_or("string", AttrValue::graphml_type);
        let name = escape(name.as_str());
        let _ = writeln!(s, "  <key id=\"{name}\" for=\"node\" attr.name=\"{name}\" attr.type=\"{ty}\"/>");
    }
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    let kind = if view.directed { "directed" } else { "undirected" };
    let _ = writeln!(s, "  <graph id=\"G\" edgedefault=\"{kind}\">");
    for (i, title) in view.titles.iter().enumerate() {
        let _ = write!(s, "    <node id=\"n{i}\"><data key=\"label\">{}</data>", escape(title.as_str()));
        for (name, values) in &view.attrs {
            if let Some(v) = &values[i] {
                let _ = write!(s, "<data key=\"{}\">{}</data>", escape(name.as_str()), escape(v.render().as_str()));
            }
        }
        s.push_str("</node>\n");
    }
    for (src, dst, w) in &view.edges {
        let _ = writeln!(
            s,
            "    <edge source=\"n{src}\" target=\"n{dst}\"><data key=\"weight\">{w}</data></edge>"
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot(view: &GraphView) -> String {
    let (kind, arrow) = if view.directed { ("digraph", "->") } else { ("graph", "--") };
    let mut s = format!("{kind} G {{\n");
    for (i, title) in view.titles.iter().enumerate() {
        let attrs: Vec<String> = view
            .attrs
            .iter()
            .filter_map(|(name, values)| Some(format!("{name}={}", dot_id(&values[i].as_ref()?.render()))))
            .collect();
        if attrs.is_empty() {
            let _ = writeln!(s, "  {};", dot_id(title));
        } else {
            let _ = writeln!(s, "  {} [{}];", dot_id(title), attrs.join(", "));
        }
    }
    for (src, dst, w) in &view.edges {
        let _ = writeln!(
            s,
            "  {} {arrow} {} [weight={w}];",
            dot_id(&view.titles[*src]),
            dot_id(&view.titles[*dst])
        );
    }
    s.push_str("}\n");
    s
}

fn edge_csv(view: &GraphView) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["src", "dst", "weight"]);
    for (src, dst, weight) in &view.edges {
        let _ = w.write_record([view.titles[*src].as_str(), view.titles[*dst].as_str(), &weight.to_string()]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}
