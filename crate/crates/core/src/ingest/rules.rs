//! Per-language person detection and date extraction rules.
//!
//! Rules are JSON documents. Every regex used for year extraction must have
//! a named group `year`; an optional group `bc` marks a year before the
//! common era and an optional group `circa` marks an approximate date.
//! Lifespan-line patterns use the groups `birth`, `birth_bc`, `death`,
//! `death_bc` and `circa` instead.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::gender::GenderLexicon;
use crate::ingest::IngestError;

/// Serialized form of a rules file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesFile {
    pub lang: String,
    pub birth_categories: Vec<String>,
    pub death_categories: Vec<String>,
    #[serde(default)]
    pub person_markers: Vec<String>,
    #[serde(default)]
    pub birth_fields: Vec<String>,
    #[serde(default)]
    pub death_fields: Vec<String>,
    #[serde(default)]
    pub lifespan_lines: Vec<String>,
    /// Gender lexicon used to classify persons during ingestion. Falls back
    /// to the bundled lexicon for `lang`.
    #[serde(default)]
    pub lexicon: Option<GenderLexicon>,
}

/// Compiled detection and dating rules for one language edition.
#[derive(Debug, Clone)]
pub struct LanguageRules {
    pub lang: String,
    pub birth_categories: Vec<Regex>,
    pub death_categories: Vec<Regex>,
    /// Case-insensitive alternation of the configured infobox markers.
    pub person_marker: Option<Regex>,
    pub birth_fields: Vec<Regex>,
    pub death_fields: Vec<Regex>,
    pub lifespan_lines: Vec<Regex>,
    pub lexicon: Option<GenderLexicon>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("en", include_str!("../../rules/detection_en.json")),
    ("de", include_str!("../../rules/detection_de.json")),
    ("es", include_str!("../../rules/detection_es.json")),
    ("pt", include_str!("../../rules/detection_pt.json")),
    ("zh", include_str!("../../rules/detection_zh.json")),
    ("ja", include_str!("../../rules/detection_ja.json")),
];

impl LanguageRules {
    /// Bundled rules for a language code, if the language is supported.
    pub fn bundled(lang: &str) -> Option<Self> {
        let (_, src) = BUNDLED.iter().find(|(l, _)| *l == lang)?;
        Some(Self::from_json(src).expect("bundled rules are valid"))
    }

    pub fn from_json(src: &str) -> Result<Self, IngestError> {
        let file: RulesFile =
            serde_json::from_str(src).map_err(|e| IngestError::Rules(e.to_string()))?;
        Self::compile(file)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let src = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&src)
    }

    pub fn compile(file: RulesFile) -> Result<Self, IngestError> {
        let compile_all = |patterns: &[String], groups: &[&str]| -> Result<Vec<Regex>, IngestError> {
            patterns
                .iter()
                .map(|p| {
                    let re = Regex::new(p).map_err(|e| IngestError::Rules(e.to_string()))?;
                    for g in groups {
                        if !re.capture_names().flatten().any(|n| n == *g) {
                            return Err(IngestError::Rules(format!(
                                "pattern {p:?} lacks the named group `{g}`"
                            )));
                        }
                    }
                    Ok(re)
                })
                .collect()
        };
        if let Some(lex) = &file.lexicon {
            lex.validate().map_err(|e| IngestError::Rules(e.to_string()))?;
        }
        Ok(Self {
            birth_categories: compile_all(&file.birth_categories, &["year"])?,
            death_categories: compile_all(&file.death_categories, &["year"])?,
            person_marker: marker_regex(&file.person_markers)?,
            birth_fields: compile_all(&file.birth_fields, &["year"])?,
            death_fields: compile_all(&file.death_fields, &["year"])?,
            lifespan_lines: compile_all(&file.lifespan_lines, &["birth", "death"])?,
            lexicon: file.lexicon,
            lang: file.lang,
        })
    }

    /// The lexicon configured in the rules, else the bundled one for the language.
    pub fn effective_lexicon(&self) -> Option<GenderLexicon> {
        self.lexicon
            .clone()
            .or_else(|| GenderLexicon::bundled(&self.lang))
    }
}

fn marker_regex(markers: &[String]) -> Result<Option<Regex>, IngestError> {
    if markers.is_empty() {
        return Ok(None);
    }
    let alternation = markers
        .iter()
        .map(|m| regex::escape(m))
        .collect::<Vec<_>>()
        .join("|");
    Regex::new(&format!("(?i){alternation}"))
        .map(Some)
        .map_err(|e| IngestError::Rules(e.to_string()))
}
