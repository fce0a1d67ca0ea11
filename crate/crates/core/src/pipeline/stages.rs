//! The individual stages, usable on their own or from [`super::run_pipeline`].

use std::io::BufReader;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::output::{write_atomic, Outputs};
use super::{PipelineError, SliceSpec, Stage};
use crate::chronology::{build_full_graph, build_slice, PeopleGraph, Year};
use crate::export::{export_graph, AttrValue, GraphFormat, GraphView};
use crate::gender::{gender_timeseries, gender_timeseries_top_k, write_timeseries_csv, Gender, GenderLexicon};
use crate::ingest::{build_people_index, open_dump, reclassify, IngestOptions, IngestReport, LanguageRules, PeopleIndex};
use crate::ranking::{
    indegree, ingroup_fraction, label_entries, pagerank, rank_entries, write_rankings_csv, CategoryRules,
    InGroupStats, PageRankParams, SphereRules, SCORE_DIGITS,
};
use crate::export::format_significant;
use crate::wikinews::{
    aggregate_scores, build_news_network, parse_news_index, read_articles, SentimentLexicon,
};

fn failed(stage: Stage) -> impl Fn(String) -> PipelineError {
    move |message| PipelineError::Stage { stage, message }
}

pub fn read_index(path: &Path) -> Result<PeopleIndex, PipelineError> {
    let f = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    PeopleIndex::read_jsonl(BufReader::new(f)).map_err(|e| PipelineError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_graph(path: &Path) -> Result<PeopleGraph, PipelineError> {
    let f = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| PipelineError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Streams the dump into a people index written as JSONL at `out`.
pub fn ingest_stage(
    dump: &Path,
    rules: &LanguageRules,
    strict: bool,
    out: &Path,
    outputs: &mut Outputs,
) -> Result<(PeopleIndex, IngestReport), PipelineError> {
    let pages = open_dump(dump, strict).map_err(|e| PipelineError::Input {
        path: dump.to_path_buf(),
        message: e.to_string(),
    })?;
    let (index, report) =
        build_people_index(pages, rules, IngestOptions { strict }).map_err(|e| failed(Stage::Ingest)(e.to_string()))?;
    log::info!(
        "indexed {} persons ({} dated) from {} pages",
        report.persons,
        report.dated,
        report.pages
    );
    outputs.write(out, |w| index.write_jsonl(w))?;
    Ok((index, report))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GraphReport {
    pub nodes: usize,
    pub edges: usize,
    pub slices: usize,
    pub nonempty_slices: usize,
}

fn write_view(
    outputs: &mut Outputs,
    view: &GraphView,
    stem: &Path,
    formats: &[GraphFormat],
) -> Result<(), PipelineError> {
    for &f in formats {
        outputs.write(stem.with_extension(f.extension()), |w| export_graph(view, f, w))?;
    }
    Ok(())
}

/// Builds the all-time graph (`graph.json` plus exports) and, with a slice
/// grid, one export per nonempty slice and a `slices.csv` summary.
pub fn graph_stage(
    index: &PeopleIndex,
    slices: Option<&SliceSpec>,
    formats: &[GraphFormat],
    outputs: &mut Outputs,
) -> Result<(PeopleGraph, GraphReport), PipelineError> {
    let graph = build_full_graph(index);
    let mut report = GraphReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        ..Default::default()
    };
    outputs.write("graph.json", |w| {
        serde_json::to_writer(&mut *w, &graph)?;
        w.write_all(b"\n").map_err(serde_json::Error::io)
    })?;
    if graph.is_empty() {
        log::warn!("the graph has no dated persons; skipping exports");
    } else {
        write_view(outputs, &GraphView::from_people(&graph), Path::new("graph"), formats)?;
    }
    if let Some(spec) = slices {
        let years = spec.years()?;
        let root = outputs.root().join("slices");
        // (year, nodes, edges, written files with digests)
        type Written = (Year, usize, usize, Vec<(String, String)>);
        let written: Vec<Written> = years
            .par_iter()
            .map(|&y| {
                let slice = build_slice(&graph, y).map_err(|e| failed(Stage::Graph)(e.to_string()))?;
                let mut files = Vec::new();
                if !slice.is_empty() {
                    let view = GraphView::from_people(&slice);
                    for &f in formats {
                        let name = format!("slice_{y}.{}", f.extension());
                        let digest = write_atomic(&root.join(&name), |w| export_graph(&view, f, w))?;
                        files.push((format!("slices/{name}"), digest));
                    }
                }
                Ok((y, slice.node_count(), slice.edge_count(), files))
            })
            .collect::<Result<_, PipelineError>>()?;
        report.slices = written.len();
        report.nonempty_slices = written.iter().filter(|(_, n, _, _)| *n > 0).count();
        outputs.write("slices.csv", |w| -> Result<(), csv::Error> {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["year", "nodes", "edges"])?;
            for (y, n, e, _) in &written {
                c.write_record([y.to_string(), n.to_string(), e.to_string()])?;
            }
            c.flush()?;
            Ok(())
        })?;
        for (_, _, _, files) in written {
            for (key, digest) in files {
                outputs.record(key, digest);
            }
        }
        log::info!("{} slices, {} nonempty", report.slices, report.nonempty_slices);
    }
    Ok((graph, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub ranked: usize,
    pub iterations: u32,
    pub converged: bool,
    pub ingroup: Option<InGroupStats>,
}

pub struct RankOptions<'a> {
    pub top: usize,
    pub params: PageRankParams,
    pub categories: &'a CategoryRules,
    pub sphere: Option<&'a SphereRules>,
    pub slices: Option<&'a SliceSpec>,
}

/// Ranks the all-time graph into `rankings.csv`, writes in-group
/// statistics when a sphere is given, a GraphML copy carrying the scores,
/// and per-slice leader lists when a slice grid is given.
pub fn rank_stage(
    graph: &PeopleGraph,
    options: &RankOptions<'_>,
    outputs: &mut Outputs,
) -> Result<RankReport, PipelineError> {
    let fail = failed(Stage::Rank);
    let pr = pagerank(graph, &options.params).map_err(|e| fail(e.to_string()))?;
    if !pr.converged {
        log::warn!("PageRank did not converge in {} sweeps", pr.iterations);
    }
    let deg = indegree(graph);
    let mut entries = rank_entries(graph, &pr.scores, &deg);
    entries.truncate(options.top);
    let rows = label_entries(graph, entries, Some(options.categories), options.sphere);
    outputs.write("rankings.csv", |w| write_rankings_csv(&rows, w))?;
    let ingroup = match options.sphere {
        Some(_) => {
            let labeled: Vec<_> = rows.iter().filter_map(|r| r.labeled()).collect();
            let stats = ingroup_fraction(&labeled).map_err(|e| fail(e.to_string()))?;
            outputs.write("ingroup.json", |w| {
                serde_json::to_writer_pretty(&mut *w, &stats)?;
                w.write_all(b"\n").map_err(serde_json::Error::io)
            })?;
            Some(stats)
        }
        None => None,
    };

    let mut view = GraphView::from_people(graph);
    view.set_attr("pagerank", pr.scores.iter().map(|&s| Some(AttrValue::Double(s))).collect())?;
    view.set_attr("indegree", deg.iter().map(|&d| Some(AttrValue::Int(d.into()))).collect())?;
    view.set_attr(
        "category",
        graph
            .nodes()
            .iter()
            .map(|n| Some(AttrValue::Str(options.categories.classify(&n.categories).class.as_str().into())))
            .collect(),
    )?;
    outputs.write("graph_ranked.graphml", |w| export_graph(&view, GraphFormat::Graphml, w))?;

    if let Some(spec) = options.slices {
        let years = spec.years()?;
        let per_year: Vec<Vec<[String; 5]>> = years
            .par_iter()
            .map(|&y| {
                let slice = build_slice(graph, y).map_err(|e| fail(e.to_string()))?;
                if slice.is_empty() {
                    return Ok(Vec::new());
                }
                let pr = pagerank(&slice, &options.params).map_err(|e| fail(e.to_string()))?;
                let mut entries = rank_entries(&slice, &pr.scores, &indegree(&slice));
                entries.truncate(options.top);
                Ok(entries
                    .into_iter()
                    .map(|e| {
                        [
                            y.to_string(),
                            e.rank.to_string(),
                            e.title,
                            format_significant(e.pagerank, SCORE_DIGITS),
                            e.indegree.to_string(),
                        ]
                    })
                    .collect())
            })
            .collect::<Result<_, PipelineError>>()?;
        outputs.write("slice_rankings.csv", |w| -> Result<(), csv::Error> {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["year", "rank", "title", "pagerank", "indegree"])?;
            for row in per_year.iter().flatten() {
                c.write_record(row)?;
            }
            c.flush()?;
            Ok(())
        })?;
    }
    Ok(RankReport {
        ranked: rows.len(),
        iterations: pr.iterations,
        converged: pr.converged,
        ingroup,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GenderReport {
    pub female: usize,
    pub male: usize,
    pub unknown: usize,
    pub years: usize,
    pub null_years: usize,
}

/// Optionally reclassifies the index with `lexicon`, then writes the yearly
/// share of women as `gender_timeseries.csv`.
pub fn gender_stage(
    index: &mut PeopleIndex,
    lexicon: Option<&GenderLexicon>,
    range: (Year, Year),
    top_k: Option<(usize, PageRankParams)>,
    out: &Path,
    outputs: &mut Outputs,
) -> Result<GenderReport, PipelineError> {
    let fail = failed(Stage::Gender);
    if let Some(lex) = lexicon {
        reclassify(index, lex);
    }
    let points = match top_k {
        None => gender_timeseries(index, range.0, range.1),
        Some((k, params)) => gender_timeseries_top_k(&build_full_graph(index), range.0, range.1, k, &params),
    }
    .map_err(|e| fail(e.to_string()))?;
    outputs.write(out, |w| write_timeseries_csv(&points, w))?;
    let count = |g| index.persons().filter(|p| p.gender.gender == g).count();
    Ok(GenderReport {
        female: count(Gender::Female),
        male: count(Gender::Male),
        unknown: count(Gender::Unknown),
        years: points.len(),
        null_years: points.iter().filter(|p| p.percent_female.is_none()).count(),
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct NewsStageReport {
    pub anchors: usize,
    pub undated_anchors: usize,
    pub nodes: usize,
    pub edges: usize,
    pub scored: usize,
    pub mean_sentiment: f64,
    pub mean_emotionality: f64,
    pub mean_complexity: f64,
}

/// Parses a listing, builds and scores the topic network and writes the
/// `news_*` artifacts.
pub fn news_stage(
    listing: &Path,
    articles: &Path,
    lang: &str,
    lexicon: &SentimentLexicon,
    top: usize,
    outputs: &mut Outputs,
) -> Result<NewsStageReport, PipelineError> {
    let fail = failed(Stage::News);
    let text = std::fs::read_to_string(listing).map_err(|e| PipelineError::io(listing, e))?;
    let anchors = parse_news_index(&text, lang).map_err(|e| fail(e.to_string()))?;
    let graph = build_news_network(&anchors);
    let texts = read_articles(articles, graph.nodes()).map_err(|e| fail(e.to_string()))?;
    let report = aggregate_scores(&graph, &texts, lexicon, top).map_err(|e| fail(e.to_string()))?;
    let centrality = crate::wikinews::betweenness(&graph).map_err(|e| fail(e.to_string()))?;

    outputs.write("news_anchors.jsonl", |w| -> Result<(), serde_json::Error> {
        for a in &anchors {
            serde_json::to_writer(&mut *w, a)?;
            w.write_all(b"\n").map_err(serde_json::Error::io)?;
        }
        Ok(())
    })?;
    let mut view = graph.to_view();
    view.set_attr("betweenness", centrality.iter().map(|&b| Some(AttrValue::Double(b))).collect())?;
    let score = |f: fn(&crate::wikinews::TextScores) -> f64| {
        graph
            .nodes()
            .iter()
            .map(|t| report.scores.get(t).map(|s| AttrValue::Double(f(s))))
            .collect::<Vec<_>>()
    };
    view.set_attr("sentiment", score(|s| s.sentiment))?;
    view.set_attr("emotionality", score(|s| s.emotionality))?;
    view.set_attr("complexity", score(|s| s.complexity))?;
    outputs.write("news_graph.graphml", |w| export_graph(&view, GraphFormat::Graphml, w))?;
    outputs.write("news_edges.csv", |w| export_graph(&view, GraphFormat::EdgeCsv, w))?;
    outputs.write("news_report.csv", |w| report.write_summary_csv(w))?;
    outputs.write("news_top.csv", |w| report.write_top_csv(w))?;
    outputs.write("news_scores.csv", |w| report.write_scores_csv(w))?;
    Ok(NewsStageReport {
        anchors: anchors.len(),
        undated_anchors: anchors.iter().filter(|a| a.date.is_none()).count(),
        nodes: graph.node_count(),
        edges: graph.edges().count(),
        scored: report.scored,
        mean_sentiment: report.mean.sentiment,
        mean_emotionality: report.mean.emotionality,
        mean_complexity: report.mean.complexity,
    })
}
