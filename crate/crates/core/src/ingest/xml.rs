//! MediaWiki XML export reader.

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use regex::Regex;

use super::wikitext;
use super::{IngestError, RawPage};
use crate::title::normalize_title;

/// Buffer and throughput counters of a dump reader.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// Pages read, of any namespace.
    pub pages: u64,
    /// Namespace-0 pages handed downstream.
    pub forwarded: u64,
    /// Bytes consumed from the (decompressed) stream.
    pub bytes: u64,
    /// Largest capacity reached by the event buffer.
    pub max_event_buffer: usize,
    /// Largest page held in memory (title plus text bytes).
    pub max_page_bytes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Namespaces,
    Namespace(i64),
    Page,
    Title,
    Ns,
    Revision,
    Text,
    Other,
}

#[derive(Default)]
struct PageBuilder {
    title: String,
    ns: String,
    text: String,
    redirect: Option<String>,
}

/// Iterator over the namespace-0 pages of an XML dump.
pub struct XmlPages<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    stack: Vec<Tag>,
    page: Option<PageBuilder>,
    last_complete: u64,
    finished: bool,
    stats: ParseStats,
    extra_categories: Option<Regex>,
}

impl<R: BufRead> XmlPages<R> {
    pub fn new(source: R) -> Self {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().trim_text(false);
        Self {
            reader,
            buf: Vec::with_capacity(1 << 16),
            stack: Vec::with_capacity(8),
            page: None,
            last_complete: 0,
            finished: false,
            stats: ParseStats::default(),
            extra_categories: None,
        }
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    /// Byte offset just past the last complete `</page>`.
    pub fn last_complete_offset(&self) -> u64 {
        self.last_complete
    }

    fn open(&mut self, e: &BytesStart<'_>) -> Result<Tag, IngestError> {
        let parent = self.stack.last().copied();
        let tag = match (e.local_name().as_ref(), parent) {
            (b"namespaces", _) => Tag::Namespaces,
            (b"namespace", Some(Tag::Namespaces)) => {
                let key = attribute(e, b"key")
                    .and_then(|k| k.parse().ok())
                    .unwrap_or(i64::MIN);
                Tag::Namespace(key)
            }
            (b"page", _) => {
                self.page = Some(PageBuilder::default());
                Tag::Page
            }
            (b"title", Some(Tag::Page)) => Tag::Title,
            (b"ns", Some(Tag::Page)) => Tag::Ns,
            (b"revision", Some(Tag::Page)) => {
                // Keep only the last revision's text.
                if let Some(p) = self.page.as_mut() {
                    p.text.clear();
                }
                Tag::Revision
            }
            (b"text", Some(Tag::Revision)) => Tag::Text,
            (b"redirect", Some(Tag::Page)) => {
                if let Some(p) = self.page.as_mut() {
                    p.redirect = attribute(e, b"title").map(|t| normalize_title(&t));
                }
                Tag::Other
            }
            _ => Tag::Other,
        };
        Ok(tag)
    }

    fn text(&mut self, content: &str) {
        let Some(top) = self.stack.last().copied() else {
            return;
        };
        match top {
            Tag::Namespace(14) => {
                let name = content.trim();
                if !name.is_empty() {
                    self.extra_categories = Some(wikitext::category_regex(&[name]));
                }
            }
            Tag::Title | Tag::Ns | Tag::Text => {
                if let Some(p) = self.page.as_mut() {
                    match top {
                        Tag::Title => p.title.push_str(content),
                        Tag::Ns => p.ns.push_str(content),
                        _ => p.text.push_str(content),
                    }
                }
            }
            _ => {}
        }
    }

    fn finish_page(&mut self) -> Option<RawPage> {
        let p = self.page.take()?;
        self.stats.pages += 1;
        self.stats.max_page_bytes = self.stats.max_page_bytes.max(p.title.len() + p.text.len());
        let namespace = p.ns.trim().parse().unwrap_or(0);
        let title = normalize_title(&p.title);
        if title.is_empty() {
            log::warn!("page without title before byte {}", self.last_complete);
            return None;
        }
        if namespace != 0 {
            return None;
        }
        let mut categories = wikitext::extract_categories(&p.text);
        if let Some(re) = &self.extra_categories {
            for c in wikitext::extract_categories_with(re, &p.text) {
                if !categories.contains(&c) {
                    categories.push(c);
                }
            }
        }
        let redirect = p.redirect.or_else(|| wikitext::redirect_target(&p.text));
        self.stats.forwarded += 1;
        Some(RawPage {
            title,
            namespace,
            wikitext: p.text,
            categories,
            redirect,
        })
    }
}

fn attribute(e: &BytesStart<'_>, name: &[u8]) -> Option<String> {
    let attr = e.try_get_attribute(name).ok()??;
    attr.unescape_value().ok().map(|v| v.into_owned())
}

enum Step {
    Continue,
    Yield(Result<RawPage, IngestError>),
    Done,
}

impl<R: BufRead> XmlPages<R> {
    fn step(&mut self, buf: &mut Vec<u8>) -> Step {
        buf.clear();
        let event = self.reader.read_event_into(buf);
        self.stats.bytes = self.reader.buffer_position();
        let event = match event {
            Ok(ev) => ev,
            Err(e) => {
                return Step::Yield(Err(IngestError::MalformedXml {
                    offset: self.reader.error_position(),
                    last_complete: self.last_complete,
                    message: e.to_string(),
                }))
            }
        };
        match event {
            Event::Start(e) => match self.open(&e) {
                Ok(tag) => self.stack.push(tag),
                Err(err) => return Step::Yield(Err(err)),
            },
            Event::Empty(e) => {
                // `<text/>` or `<redirect title=".."/>` opens and closes at once.
                if let Err(err) = self.open(&e) {
                    return Step::Yield(Err(err));
                }
            }
            Event::Text(t) => match t.unescape() {
                Ok(s) => self.text(&s),
                Err(e) => {
                    return Step::Yield(Err(IngestError::MalformedXml {
                        offset: self.reader.buffer_position(),
                        last_complete: self.last_complete,
                        message: e.to_string(),
                    }))
                }
            },
            Event::CData(c) => {
                let raw = String::from_utf8_lossy(&c).into_owned();
                self.text(&raw);
            }
            Event::End(_) => {
                if self.stack.pop() == Some(Tag::Page) {
                    self.last_complete = self.reader.buffer_position();
                    if let Some(page) = self.finish_page() {
                        return Step::Yield(Ok(page));
                    }
                }
            }
            Event::Eof => {
                if !self.stack.is_empty() {
                    return Step::Yield(Err(IngestError::Truncated {
                        last_complete: self.last_complete,
                    }));
                }
                return Step::Done;
            }
            _ => {}
        }
        Step::Continue
    }
}

impl<R: BufRead> Iterator for XmlPages<R> {
    type Item = Result<RawPage, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        let mut buf = std::mem::take(&mut self.buf);
        let out = loop {
            let step = self.step(&mut buf);
            self.stats.max_event_buffer = self.stats.max_event_buffer.max(buf.capacity());
            match step {
                Step::Continue => continue,
                Step::Yield(item) => {
                    self.finished = item.is_err();
                    break Some(item);
                }
                Step::Done => {
                    self.finished = true;
                    break None;
                }
            }
        };
        self.buf = buf;
        out
    }
}
