//! Article text directories and the optional fetcher that fills them.
//!
//! Each article is one UTF-8 file named after its percent-encoded title
//! with a `.txt` extension.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use regex::Regex;
use serde::Serialize;

use super::WikinewsError;

/// Everything but ASCII letters, digits, `-`, `_` and `~` is encoded, so
/// names never contain separators or start with a dot.
const FILENAME: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'~');

pub fn article_filename(title: &str) -> String {
    format!("{}.txt", utf8_percent_encode(title, FILENAME))
}

/// Inverse of [`article_filename`].
pub fn title_from_filename(name: &str) -> Option<String> {
    let stem = name.strip_suffix(".txt")?;
    percent_decode_str(stem).decode_utf8().ok().map(|s| s.into_owned())
}

/// Reads the texts of `titles` that exist in `dir`.
pub fn read_articles<'a>(
    dir: &Path,
    titles: impl IntoIterator<Item = &'a String>,
) -> Result<BTreeMap<String, String>, WikinewsError> {
    let mut out = BTreeMap::new();
    for title in titles {
        let path = dir.join(article_filename(title));
        match std::fs::read(&path) {
            Ok(bytes) => {
                let text = String::from_utf8(bytes).map_err(|_| WikinewsError::NotUtf8(path.clone()))?;
                out.insert(title.clone(), text);
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(WikinewsError::io(&path, e)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Page URL prefix; the percent-encoded title and `?action=render` are
    /// appended.
    pub base_url: String,
    /// Upper bound on requests started per second, across all workers.
    pub requests_per_second: f64,
    pub concurrency: usize,
    pub timeout: Duration,
    pub user_agent: String,
}

impl FetchOptions {
    pub fn for_language(lang: &str) -> Self {
        Self {
            base_url: format!("https://{lang}.wikipedia.org/wiki/"),
            requests_per_second: 2.0,
            concurrency: 2,
            timeout: Duration::from_secs(30),
            user_agent: concat!("chronograph/", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FetchReport {
    pub fetched: usize,
    /// Titles whose file already existed.
    pub cached: usize,
    /// Titles that failed, with the error message.
    pub failed: Vec<(String, String)>,
}

/// Paces request starts to at most `rps` per second.
struct Pacer {
    next: Mutex<Instant>,
    interval: Duration,
}

impl Pacer {
    fn new(rps: f64) -> Self {
        Self {
            next: Mutex::new(Instant::now()),
            interval: Duration::from_secs_f64(1.0 / rps),
        }
    }

    fn wait(&self) {
        let slot = {
            let mut next = self.next.lock().unwrap_or_else(PoisonError::into_inner);
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + self.interval;
            slot
        };
        let now = Instant::now();
        if slot > now {
            std::thread::sleep(slot - now);
        }
    }
}

/// Downloads the rendered HTML of each title, strips it to plain text and
/// stores it in `out_dir`. Titles already present are skipped.
pub fn fetch_articles(titles: &[String], out_dir: &Path, options: &FetchOptions) -> Result<FetchReport, WikinewsError> {
    if options.requests_per_second.is_nan() || options.requests_per_second <= 0.0 || options.concurrency == 0 {
        return Err(WikinewsError::InvalidFetchOptions);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| WikinewsError::io(out_dir, e))?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(options.timeout))
        .build()
        .into();
    let pacer = Pacer::new(options.requests_per_second);
    let mut pending = Vec::new();
    let mut report = FetchReport::default();
    for t in titles {
        if out_dir.join(article_filename(t)).exists() {
            report.cached += 1;
        } else {
            pending.push(t.clone());
        }
    }
    let queue = Mutex::new(pending.into_iter());
    let results = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..options.concurrency {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap_or_else(PoisonError::into_inner).next();
                let Some(title) = next else { break };
                pacer.wait();
                let outcome = fetch_one(&agent, &title, out_dir, options);
                results.lock().unwrap_or_else(PoisonError::into_inner).push((title, outcome));
            });
        }
    });
    let mut results = results.into_inner().unwrap_or_else(PoisonError::into_inner);
    results.sort_by(|a, b| a.0.cmp(&b.0));
    for (title, outcome) in results {
        match outcome {
            Ok(()) => report.fetched += 1,
            Err(e) => {
                log::warn!("fetching {title:?} failed: {e}");
                report.failed.push((title, e));
            }
        }
    }
    Ok(report)
}

fn fetch_one(agent: &ureq::Agent, title: &str, out_dir: &Path, options: &FetchOptions) -> Result<(), String> {
    let encoded = utf8_percent_encode(&title.replace(' ', "_"), FILENAME).to_string();
    let url = format!("{}{encoded}?action=render", options.base_url);
    let html = agent
        .get(&url)
        .header("User-Agent", &options.user_agent)
        .call()
        .map_err(|e| e.to_string())?
        .body_mut()
        .read_to_string()
        .map_err(|e| e.to_string())?;
    let text = html_to_text(&html);
    let path: PathBuf = out_dir.join(article_filename(title));
    let mut tmp = tempfile::NamedTempFile::new_in(out_dir).map_err(|e| e.to_string())?;
    tmp.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    tmp.persist(&path).map_err(|e| e.to_string())?;
    Ok(())
}

static DROPPED_BLOCKS: std::sync::LazyLock<Regex> =
    std::sync::LazyLock::new(|| Regex::new(r"(?is)<(script|style)\b.*?</(script|style)\s*>|<!--.*?-->").unwrap());
static TAG: std::sync::LazyLock<Regex> = std::sync::LazyLock::new(|| Regex::new(r"(?s)<[^>]*>").unwrap());
static BLANK_RUNS: std::sync::LazyLock<Regex> = std::sync::LazyLock::new(|| Regex::new(r"[ \t]*\n\s*").unwrap());

/// Plain text of an HTML fragment: scripts, styles, comments and tags
/// removed, common entities decoded.
pub fn html_to_text(html: &str) -> String {
    let s = DROPPED_BLOCKS.replace_all(html, " ");
    let s = TAG.replace_all(&s, " ");
    let s = decode_entities(&s);
    let s = BLANK_RUNS.replace_all(&s, "\n");
    s.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let Some(end) = rest.find(';').filter(|&e| e <= 10) else {
            out.push('&');
            rest = &rest[1..];
            continue;
        };
        let name = &rest[1..end];
        let decoded = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some(' '),
            _ => name
                .strip_prefix("#x")
                .or_else(|| name.strip_prefix("#X"))
                .and_then(|h| u32::from_str_radix(h, 16).ok())
                .or_else(|| name.strip_prefix('#').and_then(|d| d.parse().ok()))
                .and_then(char::from_u32),
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &rest[end + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
