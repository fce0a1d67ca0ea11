//! Dated news entries from Wikinews listing pages.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Serialize, Serializer};

use super::WikinewsError;
use crate::ingest::wikitext::wikipedia_link_targets;
use crate::text::{lower, tokens};

/// A calendar date of day or month precision; the year may come from
/// context and be missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NewsDate {
    pub year: Option<i32>,
    pub month: u32,
    pub day: Option<u32>,
}

impl fmt::Display for NewsDate {
    /// ISO 8601: `2014-07-17`, `2014-07`, or `--07-17` without a year.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.year, self.day) {
            (Some(y), Some(d)) => write!(f, "{y:04}-{:02}-{d:02}", self.month),
            (Some(y), None) => write!(f, "{y:04}-{:02}", self.month),
            (None, Some(d)) => write!(f, "--{:02}-{d:02}", self.month),
            (None, None) => write!(f, "--{:02}", self.month),
        }
    }
}

impl Serialize for NewsDate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One bulleted news entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewsAnchor {
    /// Nearest preceding date heading; `None` when the entry precedes every
    /// date heading.
    pub date: Option<NewsDate>,
    /// Entry text with link markup replaced by the link labels.
    pub summary: String,
    /// Linked article titles, first occurrence order, without duplicates.
    pub links: Vec<String>,
}

const MONTHS_EN: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];
const MONTHS_DE: [&str; 12] = [
    "januar", "februar", "märz", "april", "mai", "juni", "juli", "august", "september", "oktober",
    "november", "dezember",
];
const MONTHS_ES: [&str; 12] = [
    "enero", "febrero", "marzo", "abril", "mayo", "junio", "julio", "agosto", "septiembre",
    "octubre", "noviembre", "diciembre",
];
const MONTHS_PT: [&str; 12] = [
    "janeiro", "fevereiro", "março", "abril", "maio", "junho", "julho", "agosto", "setembro",
    "outubro", "novembro", "dezembro",
];

fn month_names(lang: &str) -> Option<&'static [&'static str; 12]> {
    match lang {
        "en" => Some(&MONTHS_EN),
        "de" => Some(&MONTHS_DE),
        "es" => Some(&MONTHS_ES),
        "pt" => Some(&MONTHS_PT),
        _ => None,
    }
}

fn month_of(token: &str, names: &[&str; 12]) -> Option<u32> {
    if token == "setiembre" {
        return Some(9);
    }
    let i = names.iter().position(|m| *m == token).or_else(|| {
        // English abbreviations ("Jul", "Sept") are common in headings.
        (token.len() >= 3).then(|| MONTHS_EN.iter().position(|m| m.starts_with(token)))?
    })?;
    Some(i as u32 + 1)
}

fn days_in_month(year: Option<i32>, month: u32) -> u32 {
    match month {
        4 | 6 | 9 | 11 => 30,
        2 => match year {
            Some(y) if !(y % 4 == 0 && (y % 100 != 0 || y % 400 == 0)) => 28,
            _ => 29,
        },
        _ => 31,
    }
}

static HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(=+)\s*(.*?)\s*=+\s*$").unwrap());
static ISO: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(\d{4})-(\d{2})-(\d{2})\b").unwrap());
static PIPED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\[[^\[\]|]*\|([^\[\]]*)\]\]").unwrap());
static PLAIN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[\[(?::?[wW]:(?:[a-z]{2,3}:)?)?([^\[\]|]*)\]\]").unwrap());
static SPACES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s+").unwrap());

enum Heading {
    Date(NewsDate),
    Year(i32),
    Other,
}

fn parse_heading(text: &str, names: &[&str; 12]) -> Heading {
    if let Some(c) = ISO.captures(text) {
        let (y, m, d) = (c[1].parse().ok(), c[2].parse().unwrap_or(0), c[3].parse().ok());
        if (1..=12).contains(&m) && d.is_some_and(|d| d >= 1 && d <= days_in_month(y, m)) {
            return Heading::Date(NewsDate { year: y, month: m, day: d });
        }
        return Heading::Other;
    }
    let (mut month, mut day, mut year) = (None, None, None);
    for tok in tokens(text) {
        let tok = lower(tok);
        if let Ok(n) = tok.parse::<u32>() {
            match tok.len() {
                1 | 2 if day.is_none() => day = Some(n),
                4 if year.is_none() => year = Some(n as i32),
                _ => return Heading::Other,
            }
        } else if let Some(m) = month_of(&tok, names) {
            if month.replace(m).is_some() {
                return Heading::Other;
            }
        } else if !matches!(tok.as_ref(), "de" | "of" | "the") {
            return Heading::Other;
        }
    }
    match (month, day, year) {
        (None, None, Some(y)) => Heading::Year(y),
        (Some(m), d, y) if d.is_none_or(|d| d >= 1 && d <= days_in_month(y, m)) => {
            Heading::Date(NewsDate { year: y, month: m, day: d })
        }
        _ => Heading::Other,
    }
}

fn render_summary(entry: &str) -> String {
    let s = PIPED.replace_all(entry, "$1");
    let s = PLAIN.replace_all(&s, "$1");
    let s = s.replace("'''", "").replace("''", "");
    SPACES.replace_all(s.trim(), " ").into_owned()
}

/// Parses a listing into one anchor per bullet (`*` or `#`) line.
///
/// Date headings (`== July 17 ==`, `== 17. Juli 2014 ==`, `== 2014-07-17 ==`)
/// set the date of the entries below them; a bare year heading supplies the
/// year for later headings that lack one. Other headings leave the current
/// date in place.
pub fn parse_news_index(text: &str, lang: &str) -> Result<Vec<NewsAnchor>, WikinewsError> {
    let names = month_names(lang).ok_or_else(|| WikinewsError::UnsupportedLanguage(lang.to_string()))?;
    let mut year_context: Option<i32> = None;
    let mut current: Option<NewsDate> = None;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(c) = HEADING.captures(line) {
            match parse_heading(&c[2], names) {
                Heading::Date(mut d) => {
                    if d.year.is_none() {
                        d.year = year_context;
                    } else {
                        year_context = d.year;
                    }
                    current = Some(d);
                }
                Heading::Year(y) => {
                    year_context = Some(y);
                    current = None;
                }
                Heading::Other => {}
            }
            continue;
        }
        let Some(entry) = line.strip_prefix(['*', '#']) else {
            continue;
        };
        let entry = entry.trim_start_matches(['*', '#', ':']).trim();
        if entry.is_empty() {
            continue;
        }
        let mut links: Vec<String> = Vec::new();
        for t in wikipedia_link_targets(entry) {
            if !links.contains(&t) {
                links.push(t);
            }
        }
        out.push(NewsAnchor {
            date: current,
            summary: render_summary(entry),
            links,
        });
    }
    Ok(out)
}
