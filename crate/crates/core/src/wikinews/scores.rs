//! Lexicon-based sentiment, emotionality and complexity of article texts.
//!
//! With `p` positive and `n` negative lexicon hits among `T` tokens:
//! sentiment is `p / (p + n)` (0.5 without hits), emotionality is
//! `(p + n) / T`, and complexity is the type-token ratio times the mean
//! token length in characters.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{betweenness, NewsGraph, WikinewsError};
use crate::export::format_significant;
use crate::text::{lower, tokens};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SentimentLexicon {
    pub lang: String,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("en", include_str!("../../rules/sentiment_en.json")),
    ("de", include_str!("../../rules/sentiment_de.json")),
    ("es", include_str!("../../rules/sentiment_es.json")),
    ("pt", include_str!("../../rules/sentiment_pt.json")),
];

impl SentimentLexicon {
    pub fn bundled(lang: &str) -> Option<Self> {
        let (_, src) = BUNDLED.iter().find(|(l, _)| *l == lang)?;
        Some(Self::from_json(src).expect("bundled lexicons are valid"))
    }

    pub fn from_json(src: &str) -> Result<Self, WikinewsError> {
        let lex: Self = serde_json::from_str(src).map_err(|e| WikinewsError::Lexicon(e.to_string()))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, WikinewsError> {
        let src = std::fs::read_to_string(path).map_err(|e| WikinewsError::io(path, e))?;
        Self::from_json(&src)
    }

    /// Terms must be lowercase single tokens and the sets disjoint.
    pub fn validate(&self) -> Result<(), WikinewsError> {
        for t in self.positive.iter().chain(&self.negative) {
            if t.is_empty() || lower(t) != t.as_str() || tokens(t).next() != Some(t.as_str()) {
                return Err(WikinewsError::Lexicon(format!("term {t:?} is not a lowercase token")));
            }
        }
        let pos: HashSet<_> = self.positive.iter().collect();
        if let Some(t) = self.negative.iter().find(|t| pos.contains(t)) {
            return Err(WikinewsError::Lexicon(format!("term {t:?} is both positive and negative")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TextScores {
    pub sentiment: f64,
    pub emotionality: f64,
    pub complexity: f64,
}

/// Scores one text; fails when it has no tokens.
pub fn score_text(text: &str, lexicon: &SentimentLexicon) -> Result<TextScores, WikinewsError> {
    let positive: HashSet<&str> = lexicon.positive.iter().map(String::as_str).collect();
    let negative: HashSet<&str> = lexicon.negative.iter().map(String::as_str).collect();
    let (mut p, mut n, mut total, mut chars) = (0u64, 0u64, 0u64, 0u64);
    let mut distinct: HashSet<String> = HashSet::new();
    for tok in tokens(text) {
        let tok = lower(tok);
        total += 1;
        chars += tok.chars().count() as u64;
        if positive.contains(tok.as_ref()) {
            p += 1;
        } else if negative.contains(tok.as_ref()) {
            n += 1;
        }
        if !distinct.contains(tok.as_ref()) {
            distinct.insert(tok.into_owned());
        }
    }
    if total == 0 {
        return Err(WikinewsError::EmptyText);
    }
    let t = total as f64;
    let hits = (p + n) as f64;
    Ok(TextScores {
        sentiment: if p + n > 0 { p as f64 / hits } else { 0.5 },
        emotionality: hits / t,
        complexity: (distinct.len() as f64 / t) * (chars as f64 / t),
    })
}

/// Unweighted means of sentiment, emotionality and complexity.
pub fn mean_scores(scores: &[TextScores]) -> Result<TextScores, WikinewsError> {
    if scores.is_empty() {
        return Err(WikinewsError::NothingScored);
    }
    let n = scores.len() as f64;
    let sum = |f: fn(&TextScores) -> f64| scores.iter().map(f).sum::<f64>() / n;
    Ok(TextScores {
        sentiment: sum(|s| s.sentiment),
        emotionality: sum(|s| s.emotionality),
        complexity: sum(|s| s.complexity),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicCentrality {
    pub title: String,
    pub betweenness: f64,
}

/// Language-level summary of a news network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewsReport {
    pub lang: String,
    /// Nodes with a non-empty article text.
    pub scored: usize,
    pub mean: TextScores,
    /// Highest betweenness first, ties by title.
    pub top: Vec<TopicCentrality>,
    /// Per-node scores, by title.
    pub scores: BTreeMap<String, TextScores>,
}

/// Scores every node that has a text, averages the scores and lists the
/// `k` most central topics.
pub fn aggregate_scores(
    graph: &NewsGraph,
    texts: &BTreeMap<String, String>,
    lexicon: &SentimentLexicon,
    k: usize,
) -> Result<NewsReport, WikinewsError> {
    let scored: Vec<(String, TextScores)> = graph
        .nodes()
        .par_iter()
        .filter_map(|title| {
            let text = texts.get(title)?;
            match score_text(text, lexicon) {
                Ok(s) => Some((title.clone(), s)),
                Err(_) => {
                    log::warn!("article {title:?} has no tokens; not scored");
                    None
                }
            }
        })
        .collect();
    let values: Vec<TextScores> = scored.iter().map(|(_, s)| *s).collect();
    let mean = mean_scores(&values)?;
    let centrality = betweenness(graph)?;
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by(|&a, &b| {
        centrality[b]
            .total_cmp(&centrality[a])
            .then_with(|| graph.nodes()[a].cmp(&graph.nodes()[b]))
    });
    let top = order
        .into_iter()
        .take(k)
        .map(|i| TopicCentrality {
            title: graph.nodes()[i].clone(),
            betweenness: centrality[i],
        })
        .collect();
    Ok(NewsReport {
        lang: lexicon.lang.clone(),
        scored: scored.len(),
        mean,
        top,
        scores: scored.into_iter().collect(),
    })
}

impl NewsReport {
    /// `language,mean_sentiment,mean_emotionality,mean_complexity`.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<(), WikinewsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["language", "mean_sentiment", "mean_emotionality", "mean_complexity"])?;
        w.write_record([
            self.lang.clone(),
            format_significant(self.mean.sentiment, 12),
            format_significant(self.mean.emotionality, 12),
            format_significant(self.mean.complexity, 12),
        ])?;
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// `rank,title,betweenness`.
    pub fn write_top_csv<W: Write>(&self, out: W) -> Result<(), WikinewsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "title", "betweenness"])?;
        for (i, t) in self.top.iter().enumerate() {
            w.write_record([(i + 1).to_string(), t.title.clone(), format_significant(t.betweenness, 12)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// `title,sentiment,emotionality,complexity` for every scored node.
    pub fn write_scores_csv<W: Write>(&self, out: W) -> Result<(), WikinewsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["title", "sentiment", "emotionality", "complexity"])?;
        for (title, s) in &self.scores {
            w.write_record([
                title.clone(),
                format_significant(s.sentiment, 12),
                format_significant(s.emotionality, 12),
                format_significant(s.complexity, 12),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> SentimentLexicon {
        SentimentLexicon {
            lang: "en".into(),
            positive: vec!["good".into(), "peace".into()],
            negative: vec!["war".into(), "crash".into()],
        }
    }

    #[test]
    fn formula_boundaries() {
        let s = score_text("good peace good", &lex()).unwrap();
        assert_eq!((s.sentiment, s.emotionality), (1.0, 1.0));
        // 2 distinct of 3 tokens, mean length 13/3.
        assert_eq!(s.complexity, (2.0 / 3.0) * (13.0 / 3.0));
        let s = score_text("the cat sat", &lex()).unwrap();
        assert_eq!((s.sentiment, s.emotionality), (0.5, 0.0));
        assert!(matches!(score_text(" ,. ", &lex()), Err(WikinewsError::EmptyText)));
    }

    #[test]
    fn three_positive_one_negative_in_forty() {
        let mut words = vec!["good", "good", "peace", "war"];
        words.extend(std::iter::repeat_n("filler", 36));
        let s = score_text(&words.join(" "), &lex()).unwrap();
        assert_eq!(s.sentiment, 0.75);
        assert_eq!(s.emotionality, 0.1);
    }

    #[test]
    fn means() {
        let a = TextScores { sentiment: 0.4, emotionality: 0.2, complexity: 1.0 };
        let b = TextScores { sentiment: 0.6, emotionality: 0.0, complexity: 3.0 };
        let m = mean_scores(&[a, b]).unwrap();
        assert_eq!((m.sentiment, m.complexity), (0.5, 2.0));
        assert!(mean_scores(&[]).is_err());
    }

    #[test]
    fn bundled_lexicons_validate() {
        for l in ["en", "de", "es", "pt"] {
            assert!(SentimentLexicon::bundled(l).is_some());
        }
        let mut bad = lex();
        bad.negative.push("good".into());
        assert!(bad.validate().is_err());
    }

    fn words() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(prop::sample::select(vec!["good", "war", "the", "cat", "Peace", "crash", "x"]), 1..50)
    }

    proptest! {
        #[test]
        fn order_invariant(ws in words()) {
            let mut rev = ws.clone();
            rev.reverse();
            let a = score_text(&ws.join(" "), &lex()).unwrap();
            let b = score_text(&rev.join(" "), &lex()).unwrap();
            prop_assert_eq!(a.sentiment, b.sentiment);
            prop_assert_eq!(a.emotionality, b.emotionality);
            prop_assert!((a.complexity - b.complexity).abs() < 1e-12);
        }

        #[test]
        fn neutral_duplication(ws in words(), extra in 1usize..20) {
            let base = ws.join(" ");
            let padded = format!("{base} {}", "filler ".repeat(extra));
            let a = score_text(&base, &lex()).unwrap();
            let b = score_text(&padded, &lex()).unwrap();
            prop_assert_eq!(a.sentiment, b.sentiment);
            if a.emotionality > 0.0 {
                prop_assert!(b.emotionality < a.emotionality);
            } else {
                prop_assert_eq!(b.emotionality, 0.0);
            }
        }
    }
}
