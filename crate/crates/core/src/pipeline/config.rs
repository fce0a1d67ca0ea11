//! Run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::chronology::{slice_years, Year};
use crate::export::GraphFormat;
use crate::ranking::PageRankParams;

/// Year grid for per-year slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub from: i32,
    pub to: i32,
    pub step: u32,
}

impl SliceSpec {
    pub fn years(&self) -> Result<Vec<Year>, PipelineError> {
        let y = |v| Year::new(v).map_err(|e| PipelineError::Config(format!("slices: {e}")));
        slice_years(y(self.from)?, y(self.to)?, self.step).map_err(|e| PipelineError::Config(format!("slices: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeseriesSpec {
    pub from: i32,
    pub to: i32,
    /// Restrict each year's population to the top `k` of its slice.
    pub top_k: Option<usize>,
}

impl Default for TimeseriesSpec {
    fn default() -> Self {
        Self {
            from: 1900,
            to: 2000,
            top_k: None,
        }
    }
}

impl TimeseriesSpec {
    pub fn range(&self) -> Result<(Year, Year), PipelineError> {
        let y = |v| Year::new(v).map_err(|e| PipelineError::Config(format!("timeseries: {e}")));
        let (from, to) = (y(self.from)?, y(self.to)?);
        if from > to {
            return Err(PipelineError::Config(format!("timeseries: {} is after {}", self.from, self.to)));
        }
        Ok((from, to))
    }
}

/// Rule and lexicon files; each falls back to the bundled file for the
/// configured language.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulePaths {
    pub detection: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub sphere: Option<PathBuf>,
    pub gender_lexicon: Option<PathBuf>,
    pub sentiment_lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewsSpec {
    /// Wikinews listing wikitext.
    pub listing: PathBuf,
    /// Directory of article texts.
    pub articles: PathBuf,
    #[serde(default = "default_news_top")]
    pub top: usize,
}

fn default_news_top() -> usize {
    20
}

fn default_top() -> usize {
    50
}

fn default_formats() -> Vec<GraphFormat> {
    vec![GraphFormat::Graphml, GraphFormat::Dot, GraphFormat::EdgeCsv]
}

/// A pipeline run. Relative paths are resolved against the directory of
/// the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub lang: String,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub dump: Option<PathBuf>,
    /// People index; defaults to `index.jsonl` in `out_dir`.
    #[serde(default)]
    pub index: Option<PathBuf>,
    /// Native graph file; defaults to `graph.json` in `out_dir`.
    #[serde(default)]
    pub graph: Option<PathBuf>,
    #[serde(default)]
    pub rules: RulePaths,
    #[serde(default)]
    pub slices: Option<SliceSpec>,
    #[serde(default = "default_formats")]
    pub graph_formats: Vec<GraphFormat>,
    #[serde(default = "default_top")]
    pub top_k: usize,
    #[serde(default)]
    pub pagerank: PageRankParams,
    #[serde(default)]
    pub timeseries: TimeseriesSpec,
    #[serde(default)]
    pub news: Option<NewsSpec>,
    /// Abort on malformed dump records instead of skipping them.
    #[serde(default)]
    pub strict: bool,
}

impl PipelineConfig {
    pub fn from_json(src: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut cfg: Self = serde_json::from_str(src).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&src, base)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        for p in [&mut self.dump, &mut self.index, &mut self.graph].into_iter().flatten() {
            fix(p);
        }
        let r = &mut self.rules;
        for p in [
            &mut r.detection,
            &mut r.categories,
            &mut r.sphere,
            &mut r.gender_lexicon,
            &mut r.sentiment_lexicon,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        if let Some(n) = &mut self.news {
            fix(&mut n.listing);
            fix(&mut n.articles);
        }
    }

    /// Checks values that do not depend on the file system.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.lang.is_empty() {
            return bad("lang is empty".into());
        }
        if self.top_k == 0 {
            return bad("top_k must be at least 1".into());
        }
        if self.graph_formats.is_empty() {
            return bad("graph_formats is empty".into());
        }
        self.pagerank
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if let Some(s) = &self.slices {
            s.years()?;
        }
        self.timeseries.range()?;
        if self.timeseries.top_k == Some(0) {
            return bad("timeseries.top_k must be at least 1".into());
        }
        if self.news.as_ref().is_some_and(|n| n.top == 0) {
            return bad("news.top must be at least 1".into());
        }
        Ok(())
    }

    pub fn index_path(&self) -> PathBuf {
        self.index.clone().unwrap_or_else(|| self.out_dir.join("index.jsonl"))
    }

    pub fn graph_path(&self) -> PathBuf {
        self.graph.clone().unwrap_or_else(|| self.out_dir.join("graph.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let cfg = PipelineConfig::from_json(
            r#"{"lang":"en","out_dir":"out","dump":"data/d.xml","rules":{"sphere":"/abs/s.json"}}"#,
            Path::new("/cfg"),
        )
        .unwrap();
        assert_eq!(cfg.out_dir, Path::new("/cfg/out"));
        assert_eq!(cfg.dump.as_deref(), Some(Path::new("/cfg/data/d.xml")));
        assert_eq!(cfg.rules.sphere.as_deref(), Some(Path::new("/abs/s.json")));
        assert_eq!(cfg.index_path(), Path::new("/cfg/out/index.jsonl"));
        assert_eq!(cfg.top_k, 50);
        assert_eq!(cfg.pagerank, PageRankParams::default());
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        let base = Path::new("/");
        for src in [
            r#"{"lang":"en","out_dir":"o","bogus":1}"#,
            r#"{"lang":"en","out_dir":"o","pagerank":{"damping":1.5}}"#,
            r#"{"lang":"en","out_dir":"o","slices":{"from":100,"to":10,"step":1}}"#,
            r#"{"lang":"en","out_dir":"o","top_k":0}"#,
            r#"{"lang":"en","out_dir":"o","rules":{"detect":"x"}}"#,
        ] {
            assert!(matches!(PipelineConfig::from_json(src, base), Err(PipelineError::Config(_))), "{src}");
        }
    }
}
