use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::year::Lifespan;
use crate::gender::GenderResult;
use crate::ingest::LinkMention;

/// One person of the people index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonRecord {
    pub title: String,
    pub lang: String,
    /// `None` for undated persons, who stay in the index but never enter a graph.
    pub lifespan: Option<Lifespan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undated_reason: Option<String>,
    /// Outgoing links to other persons, sorted by target.
    pub links: Vec<LinkMention>,
    pub gender: GenderResult,
    pub categories: Vec<String>,
    /// Occurrence counts of gender lexicon terms in the page text.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub terms: BTreeMap<String, u32>,
}

impl PersonRecord {
    /// An undated record without links, for fixtures and tests.
    pub fn new(title: impl Into<String>, lang: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            lang: lang.into(),
            lifespan: None,
            undated_reason: None,
            links: Vec::new(),
            gender: GenderResult::default(),
            categories: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn is_dated(&self) -> bool {
        self.lifespan.is_some()
    }
}
