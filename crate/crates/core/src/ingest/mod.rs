//! Streaming ingestion of MediaWiki dumps into a people index.

mod index;
mod jsonl;
mod rules;
pub mod wikitext;
mod xml;

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use bzip2::bufread::MultiBzDecoder;
use flate2::bufread::MultiGzDecoder;
use serde::{Deserialize, Serialize};

pub use index::{build_people_index, reclassify, resolve_links, IngestOptions, IngestReport, PeopleIndex};
pub use jsonl::JsonlPages;
pub use rules::{LanguageRules, RulesFile};
pub use wikitext::{extract_person_links, LinkMention};
pub use xml::{ParseStats, XmlPages};

/// Errors raised while reading dumps or building the index.
#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("read error after byte {offset}: {source}")]
    Read {
        offset: u64,
        #[source]
        source: std::io::Error,
    },
    /// The XML stream is not well formed. `offset` is where the reader
    /// stopped; `last_complete` is the end of the last fully read `</page>`.
    #[error("malformed XML at byte {offset} (last complete page ends at byte {last_complete}): {message}")]
    MalformedXml {
        offset: u64,
        last_complete: u64,
        message: String,
    },
    /// The stream ended inside an open element.
    #[error("dump truncated; last complete page ends at byte {last_complete}")]
    Truncated { last_complete: u64 },
    #[error("line {line} (byte {offset}): {message}")]
    JsonlLine {
        line: u64,
        offset: u64,
        message: String,
    },
    #[error("invalid rules: {0}")]
    Rules(String),
    #[error("invalid index record at line {line}: {message}")]
    IndexRecord { line: u64, message: String },
}

impl IngestError {
    /// Per-record errors that a non-strict run may skip.
    pub fn is_recoverable(&self) -> bool {
        matches!(self, IngestError::JsonlLine { .. })
    }
}

/// One page as read from a dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPage {
    /// Normalized title; never empty, never contains `_`.
    pub title: String,
    pub namespace: i64,
    pub wikitext: String,
    pub categories: Vec<String>,
    /// Target of a redirect page.
    pub redirect: Option<String>,
}

impl RawPage {
    /// Builds a page from source text, deriving categories and redirect
    /// target from the wikitext.
    pub fn from_wikitext(title: &str, namespace: i64, wikitext: String) -> Self {
        Self {
            title: crate::title::normalize_title(title),
            namespace,
            categories: wikitext::extract_categories(&wikitext),
            redirect: wikitext::redirect_target(&wikitext),
            wikitext,
        }
    }
}

/// Supported dump encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DumpFormat {
    /// MediaWiki `pages-articles` XML export.
    Xml,
    /// One JSON object per line: `{"title","ns","text","categories"}`.
    Jsonl,
}

/// Wraps `source` in a decompressor when it starts with gzip or bzip2 magic bytes.
pub fn decompress<R: Read + Send + 'static>(source: R) -> std::io::Result<Box<dyn BufRead + Send>> {
    let mut buffered = BufReader::with_capacity(1 << 16, source);
    let head = buffered.fill_buf()?;
    if head.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::with_capacity(1 << 16, MultiGzDecoder::new(buffered))))
    } else if head.starts_with(b"BZh") {
        Ok(Box::new(BufReader::with_capacity(1 << 16, MultiBzDecoder::new(buffered))))
    } else {
        Ok(Box::new(buffered))
    }
}

/// Guesses the dump format from the first non-whitespace byte.
pub fn sniff_format<R: BufRead + ?Sized>(reader: &mut R) -> std::io::Result<DumpFormat> {
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            return Ok(DumpFormat::Xml);
        }
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(i) => {
                return Ok(if buf[i] == b'{' { DumpFormat::Jsonl } else { DumpFormat::Xml });
            }
            None => {
                let n = buf.len();
                reader.consume(n);
            }
        }
    }
}

/// Namespace-0 pages of a dump, in dump order.
#[allow(clippy::large_enum_variant)]
pub enum DumpPages<R: BufRead> {
    Xml(XmlPages<R>),
    Jsonl(JsonlPages<R>),
}

impl<R: BufRead> Iterator for DumpPages<R> {
    type Item = Result<RawPage, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            DumpPages::Xml(p) => p.next(),
            DumpPages::Jsonl(p) => p.next(),
        }
    }
}

impl<R: BufRead> DumpPages<R> {
    /// Buffer statistics; JSONL readers report their line buffer.
    pub fn stats(&self) -> ParseStats {
        match self {
            DumpPages::Xml(p) => p.stats(),
            DumpPages::Jsonl(p) => p.stats(),
        }
    }
}

/// Streams the namespace-0 pages of `source`.
///
/// XML errors end the stream. JSONL lines that fail the schema are yielded
/// as [`IngestError::JsonlLine`] and the stream continues, unless `strict`
/// is set, in which case the first such error ends it.
pub fn parse_dump_stream<R: BufRead>(source: R, format: DumpFormat, strict: bool) -> DumpPages<R> {
    match format {
        DumpFormat::Xml => DumpPages::Xml(XmlPages::new(source)),
        DumpFormat::Jsonl => DumpPages::Jsonl(JsonlPages::new(source, strict)),
    }
}

/// Opens a dump file, transparently decompressing it and sniffing its format.
pub fn open_dump(path: &Path, strict: bool) -> Result<DumpPages<Box<dyn BufRead + Send>>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut reader = decompress(file).map_err(io_err)?;
    let format = sniff_format(&mut reader).map_err(io_err)?;
    Ok(parse_dump_stream(reader, format, strict))
}

/// True when any birth or death category rule, or any infobox marker, matches.
pub fn detect_person_page(page: &RawPage, rules: &LanguageRules) -> bool {
    let category_hit = page.categories.iter().any(|c| {
        rules
            .birth_categories
            .iter()
            .chain(&rules.death_categories)
            .any(|re| re.is_match(c))
    });
    category_hit
        || rules
            .person_marker
            .as_ref()
            .is_some_and(|re| re.is_match(&page.wikitext))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(categories: &[&str], text: &str) -> RawPage {
        RawPage {
            title: "T".into(),
            namespace: 0,
            wikitext: text.into(),
            categories: categories.iter().map(|s| s.to_string()).collect(),
            redirect: None,
        }
    }

    #[test]
    fn detection_by_category() {
        let en = LanguageRules::bundled("en").unwrap();
        assert!(detect_person_page(&page(&["46 births"], ""), &en));
        assert!(detect_person_page(&page(&["120 deaths"], ""), &en));
        assert!(detect_person_page(&page(&["318 BC births"], ""), &en));
        assert!(!detect_person_page(&page(&["Cities in Italy", "Populated places"], "Rome is a city."), &en));
        assert!(!detect_person_page(&page(&["1990s births of lambs"], ""), &en));
    }

    #[test]
    fn detection_by_marker() {
        let en = LanguageRules::bundled("en").unwrap();
        assert!(detect_person_page(&page(&[], "{{infobox Royalty\n| name = X}}"), &en));
        let de = LanguageRules::bundled("de").unwrap();
        assert!(detect_person_page(&page(&["Geboren 46"], ""), &de));
        assert!(detect_person_page(&page(&["Gestorben 272 v. Chr."], ""), &de));
    }

    #[test]
    fn sniffing() {
        let mut a: &[u8] = b"  \n{\"title\":1}";
        assert_eq!(sniff_format(&mut a).unwrap(), DumpFormat::Jsonl);
        let mut b: &[u8] = b"<mediawiki>";
        assert_eq!(sniff_format(&mut b).unwrap(), DumpFormat::Xml);
    }

    #[test]
    fn gzip_and_bzip2_are_detected() {
        use std::io::Write;
        let payload = b"<mediawiki></mediawiki>".to_vec();
        let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::fast());
        gz.write_all(&payload).unwrap();
        let gz = gz.finish().unwrap();
        let mut bz = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::fast());
        bz.write_all(&payload).unwrap();
        let bz = bz.finish().unwrap();
        for compressed in [gz, bz, payload.clone()] {
            let mut out = Vec::new();
            decompress(std::io::Cursor::new(compressed))
                .unwrap()
                .read_to_end(&mut out)
                .unwrap();
            assert_eq!(out, payload);
        }
    }
}
