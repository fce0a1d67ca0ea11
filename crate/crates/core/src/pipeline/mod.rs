//! Stage orchestration: ingest, graph, rank, gender and news behind one
//! config, with atomic artifacts, a lock per output directory and a run
//! manifest of content digests.

mod config;
mod output;
mod stages;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub use config::{NewsSpec, PipelineConfig, RulePaths, SliceSpec, TimeseriesSpec};
pub use output::{dir_digest, file_digest, write_atomic, DirLock, Outputs, LOCK_FILE};
pub use stages::{
    gender_stage, graph_stage, ingest_stage, news_stage, rank_stage, read_graph, read_index, GenderReport,
    GraphReport, NewsStageReport, RankOptions, RankReport,
};

use crate::chronology::PeopleGraph;
use crate::gender::GenderLexicon;
use crate::ingest::{LanguageRules, PeopleIndex};
use crate::ranking::{CategoryRules, SphereRules};
use crate::wikinews::SentimentLexicon;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage} needs {}, which does not exist", path.display())]
    MissingInput { stage: Stage, path: PathBuf },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("stage {stage} failed: {message}")]
    Stage { stage: Stage, message: String },
    #[error("{} is held by another run", .0.display())]
    Locked(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {}: {message}", path.display())]
    Write { path: PathBuf, message: String },
    #[error(transparent)]
    Export(#[from] crate::export::ExportError),
}

impl PipelineError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration, 3 for inputs, 4 for everything that fails
    /// once stages are running.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::MissingInput { .. } | PipelineError::Input { .. } => 3,
            _ => 4,
        }
    }
}

/// Stages in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Graph,
    Rank,
    Gender,
    News,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Graph, Stage::Rank, Stage::Gender, Stage::News];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Graph => "graph",
            Stage::Rank => "rank",
            Stage::Gender => "gender",
            Stage::News => "news",
        }
    }

    /// Parses a comma-separated list; order and repeats do not matter.
    pub fn parse_list(s: &str) -> Result<BTreeSet<Stage>, PipelineError> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(Stage::from_str)
            .collect()
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StageReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingest: Option<crate::ingest::IngestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gender: Option<GenderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub news: Option<NewsStageReport>,
}

/// Contents of `manifest.json`. Timestamps appear here and nowhere else.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub stages: Vec<Stage>,
    pub config: PipelineConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub reports: StageReports,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn require(stage: Stage, path: &Path) -> Result<(), PipelineError> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingInput {
            stage,
            path: path.to_path_buf(),
        })
    }
}

/// Inputs each requested stage reads, unless an earlier requested stage
/// produces them. Checked before anything runs.
fn precheck(cfg: &PipelineConfig, stages: &BTreeSet<Stage>) -> Result<(), PipelineError> {
    let has = |s| stages.contains(&s);
    if has(Stage::Ingest) {
        let dump = cfg
            .dump
            .as_deref()
            .ok_or_else(|| PipelineError::Config("stage ingest needs `dump`".into()))?;
        require(Stage::Ingest, dump)?;
    }
    let r = &cfg.rules;
    for (stage, path) in [
        (Stage::Ingest, &r.detection),
        (Stage::Rank, &r.categories),
        (Stage::Rank, &r.sphere),
        (Stage::Gender, &r.gender_lexicon),
        (Stage::News, &r.sentiment_lexicon),
    ] {
        if let (true, Some(p)) = (has(stage), path) {
            require(stage, p)?;
        }
    }
    if !has(Stage::Ingest) {
        for s in [Stage::Graph, Stage::Gender] {
            if has(s) {
                require(s, &cfg.index_path())?;
            }
        }
    }
    if has(Stage::Rank) && !has(Stage::Graph) {
        require(Stage::Rank, &cfg.graph_path())?;
    }
    if has(Stage::News) {
        let news = cfg
            .news
            .as_ref()
            .ok_or_else(|| PipelineError::Config("stage news needs a `news` section".into()))?;
        require(Stage::News, &news.listing)?;
        require(Stage::News, &news.articles)?;
    }
    Ok(())
}

fn load_or<T>(
    stage: Stage,
    path: Option<&Path>,
    load: impl FnOnce(&Path) -> Result<T, String>,
    fallback: impl FnOnce() -> Option<T>,
    what: &str,
) -> Result<Option<T>, PipelineError> {
    match path {
        Some(p) => load(p).map(Some).map_err(|message| PipelineError::Input {
            path: p.to_path_buf(),
            message,
        }),
        None => {
            let v = fallback();
            if v.is_none() {
                log::debug!("stage {stage}: no bundled {what}");
            }
            Ok(v)
        }
    }
}

/// Rule files are parsed before the lock is taken, so a bad rule file is an
/// input error and leaves the output directory untouched.
struct Rules {
    detection: Option<LanguageRules>,
    categories: CategoryRules,
    sphere: Option<SphereRules>,
    gender: Option<GenderLexicon>,
    sentiment: Option<SentimentLexicon>,
}

fn load_rules(cfg: &PipelineConfig, stages: &BTreeSet<Stage>) -> Result<Rules, PipelineError> {
    let r = &cfg.rules;
    let lang = cfg.lang.as_str();
    let gender = load_or(
        Stage::Gender,
        r.gender_lexicon.as_deref(),
        |p| GenderLexicon::load(p).map_err(|e| e.to_string()),
        || None,
        "gender lexicon",
    )?;
    let mut detection = None;
    if stages.contains(&Stage::Ingest) {
        let mut rules = load_or(
            Stage::Ingest,
            r.detection.as_deref(),
            |p| LanguageRules::load(p).map_err(|e| e.to_string()),
            || LanguageRules::bundled(lang),
            "detection rules",
        )?
        .ok_or_else(|| PipelineError::Config(format!("no bundled detection rules for {lang:?}; set rules.detection")))?;
        if let Some(lex) = &gender {
            rules.lexicon = Some(lex.clone());
        }
        detection = Some(rules);
    }
    let categories = load_or(
        Stage::Rank,
        r.categories.as_deref(),
        |p| CategoryRules::load(p).map_err(|e| e.to_string()),
        || Some(CategoryRules::bundled()),
        "category rules",
    )?
    .unwrap_or_else(CategoryRules::bundled);
    let sphere = load_or(
        Stage::Rank,
        r.sphere.as_deref(),
        |p| SphereRules::load(p).map_err(|e| e.to_string()),
        || SphereRules::bundled(lang),
        "sphere rules",
    )?;
    let mut sentiment = None;
    if stages.contains(&Stage::News) {
        sentiment = Some(
            load_or(
                Stage::News,
                r.sentiment_lexicon.as_deref(),
                |p| SentimentLexicon::load(p).map_err(|e| e.to_string()),
                || SentimentLexicon::bundled(lang),
                "sentiment lexicon",
            )?
            .ok_or_else(|| {
                PipelineError::Config(format!("no bundled sentiment lexicon for {lang:?}; set rules.sentiment_lexicon"))
            })?,
        );
    }
    Ok(Rules {
        detection,
        categories,
        sphere,
        gender,
        sentiment,
    })
}

fn input_digests(cfg: &PipelineConfig, stages: &BTreeSet<Stage>) -> Result<BTreeMap<String, String>, PipelineError> {
    let has = |s| stages.contains(&s);
    let mut out = BTreeMap::new();
    let mut add = |key: &str, path: &Path| -> Result<(), PipelineError> {
        let digest = if path.is_dir() { dir_digest(path)? } else { file_digest(path)? };
        out.insert(key.to_string(), digest);
        Ok(())
    };
    if has(Stage::Ingest) {
        if let Some(d) = &cfg.dump {
            add("dump", d)?;
        }
    } else if has(Stage::Graph) || has(Stage::Gender) {
        add("index", &cfg.index_path())?;
    }
    if has(Stage::Rank) && !has(Stage::Graph) {
        add("graph", &cfg.graph_path())?;
    }
    let r = &cfg.rules;
    for (key, path) in [
        ("rules.detection", &r.detection),
        ("rules.categories", &r.categories),
        ("rules.sphere", &r.sphere),
        ("rules.gender_lexicon", &r.gender_lexicon),
        ("rules.sentiment_lexicon", &r.sentiment_lexicon),
    ] {
        if let Some(p) = path {
            add(key, p)?;
        }
    }
    if let (true, Some(n)) = (has(Stage::News), &cfg.news) {
        add("news.listing", &n.listing)?;
        add("news.articles", &n.articles)?;
    }
    Ok(out)
}

fn timed<T>(stage: Stage, f: impl FnOnce() -> Result<T, PipelineError>) -> Result<T, PipelineError> {
    let start = Instant::now();
    log::info!("stage {stage}: start");
    let r = f();
    match &r {
        Ok(_) => log::info!("stage {stage}: done in {:.2?}", start.elapsed()),
        Err(e) => log::error!("stage {stage}: {e}"),
    }
    r
}

/// Runs the requested stages in dependency order and writes `manifest.json`
/// into the output directory.
///
/// Inputs are checked before the output directory is locked; an index or
/// graph produced earlier in the same run is passed on in memory.
pub fn run_pipeline(cfg: &PipelineConfig, stages: &BTreeSet<Stage>) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    if stages.is_empty() {
        return Err(PipelineError::Config("no stages requested".into()));
    }
    precheck(cfg, stages)?;
    let rules = load_rules(cfg, stages)?;
    let inputs = input_digests(cfg, stages)?;
    let _lock = DirLock::acquire(&cfg.out_dir)?;
    let started_unix = unix_now();
    let mut outputs = Outputs::new(&cfg.out_dir);
    let mut reports = StageReports::default();
    let mut index: Option<PeopleIndex> = None;
    let mut graph: Option<PeopleGraph> = None;

    let index_path = cfg.index_path();
    let load_index = |index: &mut Option<PeopleIndex>| -> Result<(), PipelineError> {
        if index.is_none() {
            *index = Some(read_index(&index_path)?);
        }
        Ok(())
    };

    for &stage in stages {
        match stage {
            Stage::Ingest => {
                let rules = rules.detection.as_ref().expect("loaded for ingest");
                let dump = cfg.dump.as_deref().expect("prechecked");
                let (idx, report) = timed(stage, || {
                    ingest_stage(dump, rules, cfg.strict, &index_path, &mut outputs)
                })?;
                reports.ingest = Some(report);
                index = Some(idx);
            }
            Stage::Graph => {
                load_index(&mut index)?;
                let idx = index.as_ref().expect("loaded");
                let (g, report) = timed(stage, || {
                    graph_stage(idx, cfg.slices.as_ref(), &cfg.graph_formats, &mut outputs)
                })?;
                reports.graph = Some(report);
                graph = Some(g);
            }
            Stage::Rank => {
                if graph.is_none() {
                    graph = Some(read_graph(&cfg.graph_path())?);
                }
                let g = graph.as_ref().expect("loaded");
                let options = RankOptions {
                    top: cfg.top_k,
                    params: cfg.pagerank,
                    categories: &rules.categories,
                    sphere: rules.sphere.as_ref(),
                    slices: cfg.slices.as_ref(),
                };
                reports.rank = Some(timed(stage, || rank_stage(g, &options, &mut outputs))?);
            }
            Stage::Gender => {
                load_index(&mut index)?;
                let idx = index.as_mut().expect("loaded");
                let range = cfg.timeseries.range()?;
                let top = cfg.timeseries.top_k.map(|k| (k, cfg.pagerank));
                reports.gender = Some(timed(stage, || {
                    gender_stage(idx, rules.gender.as_ref(), range, top, Path::new("gender_timeseries.csv"), &mut outputs)
                })?);
            }
            Stage::News => {
                let news = cfg.news.as_ref().expect("prechecked");
                let lex = rules.sentiment.as_ref().expect("loaded for news");
                reports.news = Some(timed(stage, || {
                    news_stage(&news.listing, &news.articles, &cfg.lang, lex, news.top, &mut outputs)
                })?);
            }
        }
    }

    let report = RunReport {
        tool: "chronograph".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        stages: stages.iter().copied().collect(),
        config: cfg.clone(),
        inputs,
        outputs: outputs.digests().clone(),
        reports,
        started_unix,
        finished_unix: unix_now(),
    };
    write_atomic(&cfg.out_dir.join(MANIFEST), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        w.write_all(b"\n").map_err(serde_json::Error::io)
    })?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_lists_parse_into_dependency_order() {
        let s = Stage::parse_list("news, rank,ingest,rank").unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), [Stage::Ingest, Stage::Rank, Stage::News]);
        assert!(matches!(Stage::parse_list("rank,plot"), Err(PipelineError::Config(_))));
    }

    #[test]
    fn rank_without_graph_names_the_graph_path() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig::from_json(r#"{"lang":"en","out_dir":"out"}"#, dir.path()).unwrap();
        let err = run_pipeline(&cfg, &Stage::parse_list("rank").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains(&cfg.graph_path().display().to_string()), "{err}");
        assert!(!cfg.out_dir.exists());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Config("x".into()).exit_code(), 2);
        assert_eq!(PipelineError::Locked(PathBuf::from("l")).exit_code(), 4);
        let stage = PipelineError::Stage {
            stage: Stage::Graph,
            message: "m".into(),
        };
        assert_eq!(stage.exit_code(), 4);
        assert!(stage.to_string().contains("graph"));
    }
}
