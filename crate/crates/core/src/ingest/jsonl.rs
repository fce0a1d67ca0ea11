//! Line-delimited JSON page fixtures.

use std::io::BufRead;

use serde::Deserialize;

use super::{IngestError, ParseStats, RawPage};
use crate::ingest::wikitext;
use crate::title::normalize_title;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPage {
    title: String,
    ns: i64,
    text: String,
    categories: Vec<String>,
}

/// Iterator over the namespace-0 pages of a JSONL fixture.
pub struct JsonlPages<R: BufRead> {
    source: R,
    line: String,
    line_no: u64,
    offset: u64,
    strict: bool,
    finished: bool,
    stats: ParseStats,
}

impl<R: BufRead> JsonlPages<R> {
    pub fn new(source: R, strict: bool) -> Self {
        Self {
            source,
            line: String::new(),
            line_no: 0,
            offset: 0,
            strict,
            finished: false,
            stats: ParseStats::default(),
        }
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    fn parse_line(&mut self, start: u64) -> Option<Result<RawPage, IngestError>> {
        let trimmed = self.line.trim();
        if trimmed.is_empty() {
            return None;
        }
        let line_err = |message: String| IngestError::JsonlLine {
            line: self.line_no,
            offset: start,
            message,
        };
        let page: JsonPage = match serde_json::from_str(trimmed) {
            Ok(p) => p,
            Err(e) => return Some(Err(line_err(e.to_string()))),
        };
        let title = normalize_title(&page.title);
        if title.is_empty() {
            return Some(Err(line_err("empty title".into())));
        }
        self.stats.pages += 1;
        self.stats.max_page_bytes = self.stats.max_page_bytes.max(title.len() + page.text.len());
        if page.ns != 0 {
            return None;
        }
        self.stats.forwarded += 1;
        let categories = page
            .categories
            .iter()
            .map(|c| normalize_title(c))
            .filter(|c| !c.is_empty())
            .collect();
        Some(Ok(RawPage {
            redirect: wikitext::redirect_target(&page.text),
            title,
            namespace: page.ns,
            wikitext: page.text,
            categories,
        }))
    }
}

impl<R: BufRead> Iterator for JsonlPages<R> {
    type Item = Result<RawPage, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.finished {
            self.line.clear();
            let start = self.offset;
            let n = match self.source.read_line(&mut self.line) {
                Ok(n) => n,
                Err(e) => {
                    self.finished = true;
                    return Some(Err(IngestError::Read { offset: start, source: e }));
                }
            };
            self.stats.max_event_buffer = self.stats.max_event_buffer.max(self.line.capacity());
            if n == 0 {
                self.finished = true;
                return None;
            }
            self.line_no += 1;
            self.offset += n as u64;
            self.stats.bytes = self.offset;
            if let Some(item) = self.parse_line(start) {
                if item.is_err() && self.strict {
                    self.finished = true;
                }
                return Some(item);
            }
        }
        None
    }
}
