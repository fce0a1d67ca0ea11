//! Wikilink, category and redirect extraction from raw wikitext.
//!
//! The scanner works on the raw page source and never expands templates.
//! Links inside HTML comments and `<nowiki>` spans are ignored. A `[[`
//! that is not closed before the next `[[` is abandoned and scanning
//! resumes at the inner `[[`, so image captions such as
//! `[[File:X.jpg|thumb|A [[Plutarch]] bust]]` still yield `Plutarch`.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::title::normalize_title;

/// Longest link target, in bytes, that is still treated as a link.
const MAX_TARGET_BYTES: usize = 512;

/// A wikilink target together with the number of times it was linked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkMention {
    pub target: String,
    pub count: u32,
}

/// Namespace prefixes (lower case) whose links never point at articles.
const EXCLUDED_PREFIXES: &[&str] = &[
    "file", "image", "media", "category", "template", "wikipedia", "wp", "help", "portal", "user",
    "talk", "special", "draft", "module", "mediawiki", "timedtext", "book", "user talk",
    "wikipedia talk", "file talk", "template talk", "category talk", "help talk", "portal talk",
    // de
    "datei", "bild", "kategorie", "vorlage", "hilfe", "benutzer", "diskussion", "spezial",
    // es
    "archivo", "imagen", "categoría", "plantilla", "ayuda", "usuario", "especial", "anexo",
    // pt
    "ficheiro", "arquivo", "imagem", "categoria", "predefinição", "ajuda", "utilizador",
    "usuário",
    // fr
    "fichier", "catégorie", "modèle",
    // zh / ja
    "文件", "檔案", "图像", "圖像", "分类", "分類", "模板", "ファイル", "画像", "カテゴリ",
    "テンプレート",
    // interwiki project prefixes
    "wikt", "wiktionary", "s", "wikisource", "q", "wikiquote", "commons", "c", "n", "wikinews",
    "b", "wikibooks", "v", "wikiversity", "voy", "wikivoyage", "m", "meta", "metawikimedia",
    "d", "wikidata", "species", "wikispecies", "mw", "mediawikiwiki", "w", "foundation", "wmf",
    "phab", "outreach", "incubator",
];

const CATEGORY_PREFIXES: &[&str] = &[
    "Category", "Kategorie", "Categoría", "Categoria", "Catégorie", "分类", "分類", "カテゴリ",
];

static CATEGORY_LINK: LazyLock<Regex> = LazyLock::new(|| category_regex(CATEGORY_PREFIXES));

/// Regex matching `[[Prefix:Name|sort key]]` category links for the given
/// namespace names; group 1 is the category name.
pub fn category_regex(prefixes: &[&str]) -> Regex {
    let alternatives = prefixes
        .iter()
        .map(|p| regex::escape(p))
        .collect::<Vec<_>>()
        .join("|");
    Regex::new(&format!(
        r"(?i)\[\[\s*(?:{alternatives})\s*:\s*([^|\]\[]+?)\s*(?:\|[^\]\[]*)?\]\]"
    ))
    .expect("category regex")
}

static REDIRECT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\A\s*#\s*(?:redirect|weiterleitung|redirección|redireccion|redirecionamento|redirect|重定向|転送|リダイレクト)\s*:?\s*\[\[([^\]\|\[]+)",
    )
    .expect("redirect regex")
});

static INTERWIKI_LANG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\A[a-z]{2,3}(?:-[a-z]{2,8})*\z").expect("interwiki regex"));

/// Extracts every article link from `wikitext`, aggregated by normalized target.
///
/// Section anchors are stripped, links back to `self_title` are dropped and
/// namespace or interwiki links are excluded. The result is sorted by target.
pub fn extract_person_links(wikitext: &str, self_title: &str) -> Vec<LinkMention> {
    let own = normalize_title(self_title);
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for target in link_targets(wikitext) {
        if target != own {
            *counts.entry(target).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|(target, count)| LinkMention { target, count })
        .collect()
}

/// Normalized article link targets in source order, one per occurrence.
pub fn link_targets(wikitext: &str) -> Vec<String> {
    let mut out = Vec::new();
    scan_links(wikitext, |raw| {
        if let Some(t) = clean_target(raw) {
            out.push(t);
        }
    });
    out
}

/// Like [`link_targets`], but a leading Wikipedia interwiki prefix (`w:` or
/// `w:xx:`), as used on sister projects, is stripped first.
pub fn wikipedia_link_targets(wikitext: &str) -> Vec<String> {
    let mut out = Vec::new();
    scan_links(wikitext, |raw| {
        let mut rest = raw.trim().trim_start_matches(':');
        if let Some((p, tail)) = rest.split_once(':') {
            if p.trim().eq_ignore_ascii_case("w") {
                rest = tail;
                if let Some((lang, tail)) = rest.split_once(':') {
                    if INTERWIKI_LANG.is_match(lang.trim()) {
                        rest = tail;
                    }
                }
            }
        }
        if let Some(t) = clean_target(rest) {
            out.push(t);
        }
    });
    out
}

/// Category names declared in the page source, normalized, in source order
/// and without duplicates.
pub fn extract_categories(wikitext: &str) -> Vec<String> {
    extract_categories_with(&CATEGORY_LINK, wikitext)
}

/// Like [`extract_categories`] with a custom matcher from [`category_regex`].
pub fn extract_categories_with(matcher: &Regex, wikitext: &str) -> Vec<String> {
    let mut seen = Vec::new();
    for cap in matcher.captures_iter(wikitext) {
        let name = normalize_title(&cap[1]);
        if !name.is_empty() && !seen.contains(&name) {
            seen.push(name);
        }
    }
    seen
}

/// The target of a `#REDIRECT [[Target]]` page, if the page is a redirect.
pub fn redirect_target(wikitext: &str) -> Option<String> {
    let cap = REDIRECT.captures(wikitext)?;
    let raw = cap[1].split('#').next().unwrap_or("");
    let t = normalize_title(raw.trim_start_matches(':'));
    (!t.is_empty()).then_some(t)
}

fn clean_target(raw: &str) -> Option<String> {
    let raw = raw.trim();
    let raw = raw.strip_prefix(':').unwrap_or(raw);
    let raw = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    if let Some((prefix, _)) = raw.split_once(':') {
        let p = prefix.trim();
        let lowered = p.to_lowercase();
        if EXCLUDED_PREFIXES.contains(&lowered.as_str()) || INTERWIKI_LANG.is_match(p) {
            return None;
        }
    }
    let t = normalize_title(raw);
    (!t.is_empty()).then_some(t)
}

/// Calls `on_target` with the raw target text of every well-formed `[[...]]`.
fn scan_links(text: &str, mut on_target: impl FnMut(&str)) {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'<' => i = skip_markup(text, i),
            b'[' if bytes.get(i + 1) == Some(&b'[') => {
                let start = i + 2;
                match parse_link(bytes, start) {
                    LinkScan::Complete { target_end, next } => {
                        on_target(&text[start..target_end]);
                        i = next;
                    }
                    LinkScan::Resync(next) => i = next,
                    LinkScan::Invalid => i += 1,
                }
            }
            _ => i += 1,
        }
    }
}

enum LinkScan {
    Complete { target_end: usize, next: usize },
    /// Unbalanced; continue at the given position (an inner `[[` or EOF).
    Resync(usize),
    Invalid,
}

fn parse_link(bytes: &[u8], start: usize) -> LinkScan {
    let mut j = start;
    while j < bytes.len() {
        if j - start > MAX_TARGET_BYTES {
            return LinkScan::Invalid;
        }
        match bytes[j] {
            b']' if bytes.get(j + 1) == Some(&b']') => {
                return LinkScan::Complete { target_end: j, next: j + 2 };
            }
            b'[' if bytes.get(j + 1) == Some(&b'[') => return LinkScan::Resync(j),
            b'|' => {
                let target_end = j;
                let mut k = j + 1;
                while k + 1 < bytes.len() {
                    if bytes[k] == b']' && bytes[k + 1] == b']' {
                        return LinkScan::Complete { target_end, next: k + 2 };
                    }
                    if bytes[k] == b'[' && bytes[k + 1] == b'[' {
                        return LinkScan::Resync(k);
                    }
                    k += 1;
                }
                return LinkScan::Resync(bytes.len());
            }
            b'\n' | b'{' | b'}' | b'<' | b'>' | b'[' | b']' => return LinkScan::Invalid,
            _ => j += 1,
        }
    }
    LinkScan::Resync(bytes.len())
}

/// Skips an HTML comment or a `<nowiki>` span starting at `i`; otherwise
/// advances one byte.
fn skip_markup(text: &str, i: usize) -> usize {
    let rest = &text[i..];
    if let Some(body) = rest.strip_prefix("<!--") {
        return match body.find("-->") {
            Some(end) => i + 4 + end + 3,
            None => text.len(),
        };
    }
    let head = rest.as_bytes();
    if head.len() >= 7 && head[1..7].eq_ignore_ascii_case(b"nowiki") {
        let tag_end = match rest.find('>') {
            Some(e) => e,
            None => return text.len(),
        };
        if rest[..tag_end].ends_with('/') {
            return i + tag_end + 1;
        }
        return match find_ascii_ci(&rest[tag_end..], "</nowiki>") {
            Some(end) => i + tag_end + end + "</nowiki>".len(),
            None => text.len(),
        };
    }
    i + 1
}

fn find_ascii_ci(haystack: &str, needle: &str) -> Option<usize> {
    let n = needle.as_bytes();
    haystack
        .as_bytes()
        .windows(n.len())
        .position(|w| w.eq_ignore_ascii_case(n))
}
