//! Person categories and cultural in-group statistics.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::RankingError;
use crate::chronology::PersonRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryClass {
    Politician,
    Religious,
    ArtistScientist,
    Other,
}

impl CategoryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CategoryClass::Politician => "politician",
            CategoryClass::Religious => "religious",
            CategoryClass::ArtistScientist => "artist_scientist",
            CategoryClass::Other => "other",
        }
    }
}

/// A category decision and the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersonCategory {
    pub class: CategoryClass,
    /// Pattern of the matching rule; `None` for [`CategoryClass::Other`].
    pub source: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryRulesFile {
    rules: Vec<CategoryRuleSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryRuleSpec {
    pattern: String,
    category: CategoryClass,
}

/// Ordered regex rules over Wikipedia category names; the first match wins.
#[derive(Debug, Clone)]
pub struct CategoryRules {
    rules: Vec<(Regex, CategoryClass)>,
}

fn read(path: &Path) -> Result<String, RankingError> {
    std::fs::read_to_string(path).map_err(|e| RankingError::Rules(format!("{}: {e}", path.display())))
}

fn compile(pattern: &str) -> Result<Regex, RankingError> {
    Regex::new(pattern).map_err(|e| RankingError::Rules(e.to_string()))
}

impl CategoryRules {
    pub fn bundled() -> Self {
        Self::from_json(include_str!("../../rules/categories.json")).expect("bundled rules are valid")
    }

    pub fn from_json(src: &str) -> Result<Self, RankingError> {
        let file: CategoryRulesFile =
            serde_json::from_str(src).map_err(|e| RankingError::Rules(e.to_string()))?;
        let rules = file
            .rules
            .into_iter()
            .map(|r| Ok((compile(&r.pattern)?, r.category)))
            .collect::<Result<_, RankingError>>()?;
        Ok(Self { rules })
    }

    pub fn load(path: &Path) -> Result<Self, RankingError> {
        Self::from_json(&read(path)?)
    }

    /// Classifies a list of category names.
    pub fn classify(&self, categories: &[String]) -> PersonCategory {
        self.rules
            .iter()
            .find(|(re, _)| categories.iter().any(|c| re.is_match(c)))
            .map(|(re, class)| PersonCategory {
                class: *class,
                source: Some(re.as_str().to_string()),
            })
            .unwrap_or(PersonCategory {
                class: CategoryClass::Other,
                source: None,
            })
    }
}

pub fn categorize(person: &PersonRecord, rules: &CategoryRules) -> PersonCategory {
    rules.classify(&person.categories)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereFile {
    lang: String,
    in_group: Vec<String>,
}

/// Language-sphere classifier: a person is in-group when any of their
/// categories matches any pattern.
#[derive(Debug, Clone)]
pub struct SphereRules {
    pub lang: String,
    patterns: Vec<Regex>,
}

const BUNDLED_SPHERES: &[(&str, &str)] = &[
    ("en", include_str!("../../rules/sphere_en.json")),
    ("de", include_str!("../../rules/sphere_de.json")),
    ("es", include_str!("../../rules/sphere_es.json")),
    ("pt", include_str!("../../rules/sphere_pt.json")),
    ("zh", include_str!("../../rules/sphere_zh.json")),
    ("ja", include_str!("../../rules/sphere_ja.json")),
];

impl SphereRules {
    pub fn bundled(lang: &str) -> Option<Self> {
        let (_, src) = BUNDLED_SPHERES.iter().find(|(l, _)| *l == lang)?;
        Some(Self::from_json(src).expect("bundled rules are valid"))
    }

    pub fn from_json(src: &str) -> Result<Self, RankingError> {
        let file: SphereFile = serde_json::from_str(src).map_err(|e| RankingError::Rules(e.to_string()))?;
        Ok(Self {
            lang: file.lang,
            patterns: file.in_group.iter().map(|p| compile(p)).collect::<Result<_, _>>()?,
        })
    }

    pub fn load(path: &Path) -> Result<Self, RankingError> {
        Self::from_json(&read(path)?)
    }

    pub fn is_in_group(&self, categories: &[String]) -> bool {
        categories
            .iter()
            .any(|c| self.patterns.iter().any(|re| re.is_match(c)))
    }
}

/// A ranked person with its category and in-group label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledEntry {
    pub rank: usize,
    pub title: String,
    pub category: CategoryClass,
    #[serde(rename = "ingroup")]
    pub in_group: bool,
}

/// Category counts and the in-group share of a leader list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InGroupStats {
    pub total: usize,
    pub politician: usize,
    pub religious: usize,
    pub artist_scientist: usize,
    pub other: usize,
    pub in_group: usize,
    pub fraction: f64,
}

pub fn ingroup_fraction(entries: &[LabeledEntry]) -> Result<InGroupStats, RankingError> {
    if entries.is_empty() {
        return Err(RankingError::EmptyList);
    }
    let count = |c: CategoryClass| entries.iter().filter(|e| e.category == c).count();
    let in_group = entries.iter().filter(|e| e.in_group).count();
    Ok(InGroupStats {
        total: entries.len(),
        politician: count(CategoryClass::Politician),
        religious: count(CategoryClass::Religious),
        artist_scientist: count(CategoryClass::ArtistScientist),
        other: count(CategoryClass::Other),
        in_group,
        fraction: in_group as f64 / entries.len() as f64,
    })
}

/// Reads a `rank,title,category,ingroup` CSV of hand-labeled leaders.
pub fn read_labeled_csv<R: std::io::Read>(source: R) -> Result<Vec<LabeledEntry>, RankingError> {
    csv::Reader::from_reader(source)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(RankingError::from)
}
