//! Pronoun-frequency gender classification and the share of women over time.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chronology::{build_slice, PeopleGraph, Year};
use crate::export::format_significant;
use crate::ingest::PeopleIndex;
use crate::ranking::{top_k, PageRankParams};
use crate::text::{lower, tokens};

#[derive(Debug, thiserror::Error)]
pub enum GenderError {
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("labeled set is empty")]
    EmptyLabeledSet,
    #[error("gold label of item {0} is unknown")]
    UnknownGoldLabel(usize),
    #[error("invalid year range {from}..={to}")]
    InvalidRange { from: i32, to: i32 },
    #[error("labeled line {line}: {message}")]
    Labeled { line: u64, message: String },
    #[error("{path}: {message}")]
    Load { path: String, message: String },
    #[error(transparent)]
    Ranking(#[from] crate::ranking::RankingError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    #[default]
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Unknown => "unknown",
        }
    }
}

/// Gendered terms of one language. Terms are lowercase whole tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenderLexicon {
    pub lang: String,
    pub female: Vec<String>,
    pub male: Vec<String>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("en", include_str!("../rules/gender_en.json")),
    ("de", include_str!("../rules/gender_de.json")),
    ("es", include_str!("../rules/gender_es.json")),
    ("pt", include_str!("../rules/gender_pt.json")),
];

impl GenderLexicon {
    /// The shipped lexicon for `en`, `de`, `es` or `pt`.
    pub fn bundled(lang: &str) -> Option<Self> {
        let (_, src) = BUNDLED.iter().find(|(l, _)| *l == lang)?;
        Some(Self::from_json(src).expect("bundled lexicons are valid"))
    }

    /// Every bundled lexicon, in language order.
    pub fn all_bundled() -> Vec<Self> {
        BUNDLED.iter().filter_map(|(l, _)| Self::bundled(l)).collect()
    }

    pub fn from_json(src: &str) -> Result<Self, GenderError> {
        let lex: Self =
            serde_json::from_str(src).map_err(|e| GenderError::InvalidLexicon(e.to_string()))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, GenderError> {
        let src = std::fs::read_to_string(path).map_err(|e| GenderError::Load {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&src)
    }

    /// Checks that terms are non-empty, lowercase, single tokens and that
    /// the two sets are disjoint.
    pub fn validate(&self) -> Result<(), GenderError> {
        let bad = |m: String| Err(GenderError::InvalidLexicon(m));
        for t in self.female.iter().chain(&self.male) {
            if t.is_empty() || lower(t) != t.as_str() {
                return bad(format!("term {t:?} is empty or not lowercase"));
            }
            if tokens(t).count() != 1 || tokens(t).next() != Some(t.as_str()) {
                return bad(format!("term {t:?} is not a single token"));
            }
        }
        let female: HashSet<_> = self.female.iter().collect();
        if let Some(t) = self.male.iter().find(|t| female.contains(t)) {
            return bad(format!("term {t:?} is both female and male"));
        }
        Ok(())
    }

    /// The lexicon with its two term sets exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            lang: self.lang.clone(),
            female: self.male.clone(),
            male: self.female.clone(),
        }
    }
}

/// Term counts and the majority decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderResult {
    pub gender: Gender,
    pub female_count: u32,
    pub male_count: u32,
}

/// Majority vote; ties, including zero hits, are unknown.
pub fn classify_counts(female_count: u32, male_count: u32) -> GenderResult {
    let gender = match female_count.cmp(&male_count) {
        std::cmp::Ordering::Greater => Gender::Female,
        std::cmp::Ordering::Less => Gender::Male,
        std::cmp::Ordering::Equal => Gender::Unknown,
    };
    GenderResult {
        gender,
        female_count,
        male_count,
    }
}

/// Counts exact, case-insensitive token matches of each term set.
pub fn classify_gender(text: &str, lexicon: &GenderLexicon) -> GenderResult {
    let female: HashSet<&str> = lexicon.female.iter().map(String::as_str).collect();
    let male: HashSet<&str> = lexicon.male.iter().map(String::as_str).collect();
    let (mut f, mut m) = (0u32, 0u32);
    for tok in tokens(text) {
        let tok = lower(tok);
        if female.contains(tok.as_ref()) {
            f += 1;
        } else if male.contains(tok.as_ref()) {
            m += 1;
        }
    }
    classify_counts(f, m)
}

/// Classifies from precomputed term counts, as stored in the people index.
pub fn classify_terms(terms: &BTreeMap<String, u32>, lexicon: &GenderLexicon) -> GenderResult {
    let sum = |set: &[String]| set.iter().filter_map(|t| terms.get(t)).sum();
    classify_counts(sum(&lexicon.female), sum(&lexicon.male))
}

/// Counts every occurrence of the given terms in `text`.
pub fn count_terms(text: &str, vocabulary: &HashSet<String>) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for tok in tokens(text) {
        let tok = lower(tok);
        if vocabulary.contains(tok.as_ref()) {
            *out.entry(tok.into_owned()).or_insert(0) += 1;
        }
    }
    out
}

/// Fraction of items whose classification equals the gold label; unknown
/// predictions count as wrong.
pub fn validate_accuracy<S: AsRef<str> + Sync>(
    labeled: &[(S, Gender)],
    lexicon: &GenderLexicon,
) -> Result<f64, GenderError> {
    if labeled.is_empty() {
        return Err(GenderError::EmptyLabeledSet);
    }
    if let Some(i) = labeled.iter().position(|(_, g)| *g == Gender::Unknown) {
        return Err(GenderError::UnknownGoldLabel(i));
    }
    let correct = labeled
        .par_iter()
        .filter(|(text, gold)| classify_gender(text.as_ref(), lexicon).gender == *gold)
        .count();
    Ok(correct as f64 / labeled.len() as f64)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabeledText {
    #[serde(default)]
    #[allow(dead_code)]
    title: Option<String>,
    text: String,
    gender: Gender,
}

/// Reads `{"text": .., "gender": "female"|"male"}` lines; an optional
/// `title` is ignored. Blank lines are skipped.
pub fn read_labeled_texts<R: std::io::BufRead>(source: R) -> Result<Vec<(String, Gender)>, GenderError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.map_err(|e| GenderError::Labeled { line: i as u64 + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let item: LabeledText = serde_json::from_str(&line)
            .map_err(|e| GenderError::Labeled { line: i as u64 + 1, message: e.to_string() })?;
        out.push((item.text, item.gender));
    }
    Ok(out)
}

/// Share of women among the classified persons alive in one year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenderPoint {
    pub year: Year,
    /// `None` when nobody classified is alive in `year`.
    pub percent_female: Option<f64>,
    pub population: u64,
}

fn year_grid(from: Year, to: Year) -> Result<Vec<Year>, GenderError> {
    if from > to {
        return Err(GenderError::InvalidRange { from: from.value(), to: to.value() });
    }
    Ok((from.ordinal()..=to.ordinal()).map(Year::from_ordinal).collect())
}

fn point(year: Year, female: u64, population: u64) -> GenderPoint {
    GenderPoint {
        year,
        percent_female: (population > 0).then(|| 100.0 * female as f64 / population as f64),
        population,
    }
}

/// Yearly share of women among all dated, classified persons, `from` to
/// `to` inclusive.
pub fn gender_timeseries(index: &PeopleIndex, from: Year, to: Year) -> Result<Vec<GenderPoint>, GenderError> {
    let years = year_grid(from, to)?;
    let (lo, hi) = (from.ordinal(), to.ordinal());
    let len = years.len();
    // Difference arrays over the grid: +1 at birth, -1 after death.
    let mut pop = vec![0i64; len + 1];
    let mut fem = vec![0i64; len + 1];
    for p in index.persons() {
        let (Some(span), g) = (p.lifespan, p.gender.gender) else {
            continue;
        };
        if g == Gender::Unknown {
            continue;
        }
        let start = span.birth.ordinal().max(lo);
        let end = span.effective_death().ordinal().min(hi);
        if start > end {
            continue;
        }
        let (s, e) = ((start - lo) as usize, (end - lo) as usize + 1);
        pop[s] += 1;
        pop[e] -= 1;
        if g == Gender::Female {
            fem[s] += 1;
            fem[e] -= 1;
        }
    }
    let (mut p, mut f) = (0i64, 0i64);
    Ok(years
        .into_iter()
        .enumerate()
        .map(|(i, y)| {
            p += pop[i];
            f += fem[i];
            point(y, f as u64, p as u64)
        })
        .collect())
}

/// Like [`gender_timeseries`], but the population of each year is the top
/// `k` persons by PageRank of that year's slice. Years outside the slice
/// range yield null points.
pub fn gender_timeseries_top_k(
    graph: &PeopleGraph,
    from: Year,
    to: Year,
    k: usize,
    params: &PageRankParams,
) -> Result<Vec<GenderPoint>, GenderError> {
    year_grid(from, to)?
        .into_par_iter()
        .map(|y| {
            let Ok(slice) = build_slice(graph, y) else {
                return Ok(point(y, 0, 0));
            };
            if slice.is_empty() {
                return Ok(point(y, 0, 0));
            }
            let (mut f, mut n) = (0u64, 0u64);
            for e in top_k(&slice, k, params)? {
                match slice.nodes()[e.node].gender {
                    Gender::Female => {
                        f += 1;
                        n += 1;
                    }
                    Gender::Male => n += 1,
                    Gender::Unknown => {}
                }
            }
            Ok(point(y, f, n))
        })
        .collect()
}

/// Writes `year,percent_female,population`; null points leave the
/// percentage empty.
pub fn write_timeseries_csv<W: Write>(points: &[GenderPoint], out: W) -> Result<(), GenderError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "percent_female", "population"])?;
    for p in points {
        let pct = p.percent_female.map(|v| format_significant(v, 12)).unwrap_or_default();
        w.write_record([p.year.to_string(), pct, p.population.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
