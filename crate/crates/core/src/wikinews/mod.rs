//! Wikinews listings, topic co-occurrence networks and text scores.

mod articles;
mod listing;
mod network;
mod scores;

use std::path::{Path, PathBuf};

pub use articles::{
    article_filename, fetch_articles, html_to_text, read_articles, title_from_filename, FetchOptions,
    FetchReport,
};
pub use listing::{parse_news_index, NewsAnchor, NewsDate};
pub use network::{betweenness, build_news_network, NewsGraph};
pub use scores::{
    aggregate_scores, mean_scores, score_text, NewsReport, SentimentLexicon, TextScores, TopicCentrality,
};

#[derive(Debug, thiserror::Error)]
pub enum WikinewsError {
    #[error("no month names for language {0:?}")]
    UnsupportedLanguage(String),
    #[error("news graph has no nodes")]
    EmptyGraph,
    #[error("text has no tokens")]
    EmptyText,
    #[error("no article could be scored")]
    NothingScored,
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("{0} is not valid UTF-8")]
    NotUtf8(PathBuf),
    #[error("fetch needs a positive request rate and concurrency")]
    InvalidFetchOptions,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl WikinewsError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        WikinewsError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
