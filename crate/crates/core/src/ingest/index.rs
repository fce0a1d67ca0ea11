//! The people index: one record per person page, links resolved to persons.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::wikitext::extract_person_links;
use super::{detect_person_page, IngestError, LanguageRules, LinkMention, RawPage};
use crate::chronology::{extract_lifespan, PersonRecord};
use crate::gender::{classify_terms, count_terms, GenderLexicon};

/// Pages handed to the parallel workers at a time.
const BATCH: usize = 256;

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Abort on the first malformed record instead of skipping it.
    pub strict: bool,
}

/// Counters of one index build.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    /// Namespace-0 pages read.
    pub pages: u64,
    pub persons: u64,
    pub dated: u64,
    pub undated: u64,
    pub redirects: u64,
    /// Redirects whose target is another redirect; dropped.
    pub redirect_chains: u64,
    /// Titles seen more than once; the later page was kept.
    pub duplicates: u64,
    /// Malformed records skipped in lenient mode.
    pub skipped: u64,
    /// Links dropped because the target is not a person.
    pub dropped_links: u64,
}

/// Person records keyed by title, plus the redirects pointing at persons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeopleIndex {
    persons: BTreeMap<String, PersonRecord>,
    redirects: BTreeMap<String, String>,
}

impl PeopleIndex {
    pub fn from_records(records: impl IntoIterator<Item = PersonRecord>) -> Self {
        Self {
            persons: records.into_iter().map(|r| (r.title.clone(), r)).collect(),
            redirects: BTreeMap::new(),
        }
    }

    /// Persons in title order.
    pub fn persons(&self) -> impl Iterator<Item = &PersonRecord> {
        self.persons.values()
    }

    pub fn persons_mut(&mut self) -> impl Iterator<Item = &mut PersonRecord> {
        self.persons.values_mut()
    }

    pub fn get(&self, title: &str) -> Option<&PersonRecord> {
        self.persons.get(title)
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    /// Redirect title to canonical person title.
    pub fn redirects(&self) -> &BTreeMap<String, String> {
        &self.redirects
    }

    pub fn insert_redirect(&mut self, from: impl Into<String>, to: impl Into<String>) {
        self.redirects.insert(from.into(), to.into());
    }

    /// Writes one JSON record per line, sorted by title.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for record in self.persons.values() {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn read_jsonl<R: BufRead>(source: R) -> Result<Self, IngestError> {
        let mut persons = BTreeMap::new();
        for (i, line) in source.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = line.map_err(|e| IngestError::Read { offset: line_no, source: e })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: PersonRecord = serde_json::from_str(&line).map_err(|e| IngestError::IndexRecord {
                line: line_no,
                message: e.to_string(),
            })?;
            if persons.contains_key(&record.title) {
                return Err(IngestError::IndexRecord {
                    line: line_no,
                    message: format!("duplicate title {:?}", record.title),
                });
            }
            persons.insert(record.title.clone(), record);
        }
        Ok(Self {
            persons,
            redirects: BTreeMap::new(),
        })
    }
}

enum Processed {
    Redirect { from: String, to: String },
    Person(Box<PersonRecord>),
    Other,
}

struct Classifier<'a> {
    rules: &'a LanguageRules,
    lexicon: Option<GenderLexicon>,
    vocabulary: HashSet<String>,
}

impl<'a> Classifier<'a> {
    fn new(rules: &'a LanguageRules) -> Self {
        let lexicon = rules.effective_lexicon();
        // Count every bundled term too, so the index can be reclassified
        // later with any shipped lexicon.
        let vocabulary = GenderLexicon::all_bundled()
            .iter()
            .chain(lexicon.as_ref())
            .flat_map(|l| l.female.iter().chain(&l.male).cloned())
            .collect();
        Self { rules, lexicon, vocabulary }
    }

    fn process(&self, page: RawPage) -> Processed {
        if let Some(to) = page.redirect {
            return Processed::Redirect { from: page.title, to };
        }
        if !detect_person_page(&page, self.rules) {
            return Processed::Other;
        }
        let (lifespan, undated_reason) = match extract_lifespan(&page, self.rules) {
            Ok(Some(l)) => (Some(l), None),
            Ok(None) => (None, Some("no birth year".to_string())),
            Err(e) => (None, Some(e.to_string())),
        };
        let terms = count_terms(&page.wikitext, &self.vocabulary);
        let gender = self
            .lexicon
            .as_ref()
            .map(|l| classify_terms(&terms, l))
            .unwrap_or_default();
        Processed::Person(Box::new(PersonRecord {
            links: extract_person_links(&page.wikitext, &page.title),
            title: page.title,
            lang: self.rules.lang.clone(),
            lifespan,
            undated_reason,
            gender,
            categories: page.categories,
            terms,
        }))
    }
}

/// Builds the people index from a page stream and resolves its links.
///
/// Pages are classified in parallel batches and merged in stream order, so
/// the result does not depend on scheduling. A title seen twice keeps the
/// later page. Recoverable record errors are skipped unless
/// `options.strict` is set; any other error aborts.
pub fn build_people_index<I>(
    pages: I,
    rules: &LanguageRules,
    options: IngestOptions,
) -> Result<(PeopleIndex, IngestReport), IngestError>
where
    I: IntoIterator<Item = Result<RawPage, IngestError>>,
{
    let classifier = Classifier::new(rules);
    let mut report = IngestReport::default();
    let mut persons: BTreeMap<String, PersonRecord> = BTreeMap::new();
    let mut redirects: BTreeMap<String, String> = BTreeMap::new();
    let mut batch = Vec::with_capacity(BATCH);
    let mut pages = pages.into_iter();
    loop {
        batch.clear();
        for item in pages.by_ref() {
            match item {
                Ok(page) => {
                    batch.push(page);
                    if batch.len() == BATCH {
                        break;
                    }
                }
                Err(e) if e.is_recoverable() && !options.strict => {
                    log::warn!("skipping record: {e}");
                    report.skipped += 1;
                }
                Err(e) => return Err(e),
            }
        }
        if batch.is_empty() {
            break;
        }
        report.pages += batch.len() as u64;
        let processed: Vec<Processed> = batch
            .par_drain(..)
            .map(|p| classifier.process(p))
            .collect();
        for item in processed {
            let title = match &item {
                Processed::Redirect { from, .. } => from,
                Processed::Person(r) => &r.title,
                Processed::Other => continue,
            };
            if persons.remove(title).is_some() | redirects.remove(title).is_some() {
                log::debug!("duplicate title {title:?}; keeping the later page");
                report.duplicates += 1;
            }
            match item {
                Processed::Redirect { from, to } => {
                    redirects.insert(from, to);
                }
                Processed::Person(r) => {
                    persons.insert(r.title.clone(), *r);
                }
                Processed::Other => {}
            }
        }
    }
    if report.duplicates > 0 {
        log::warn!("{} duplicate titles; later pages kept", report.duplicates);
    }

    let mut index = PeopleIndex {
        persons,
        redirects: BTreeMap::new(),
    };
    for (from, to) in redirects.iter() {
        if redirects.contains_key(to) {
            report.redirect_chains += 1;
            log::debug!("dropping redirect chain {from:?} -> {to:?}");
        } else if index.persons.contains_key(to) {
            index.redirects.insert(from.clone(), to.clone());
        }
    }
    if report.redirect_chains > 0 {
        log::warn!("{} redirect chains dropped", report.redirect_chains);
    }
    report.redirects = index.redirects.len() as u64;
    report.dropped_links = resolve_links(&mut index);
    report.persons = index.len() as u64;
    report.dated = index.persons().filter(|p| p.is_dated()).count() as u64;
    report.undated = report.persons - report.dated;
    Ok((index, report))
}

/// Maps every link through one redirect hop, keeps person targets only,
/// drops self links and merges duplicates. Returns the number of link
/// mentions dropped.
pub fn resolve_links(index: &mut PeopleIndex) -> u64 {
    let persons = &index.persons;
    let redirects = &index.redirects;
    let resolved: Vec<(Vec<LinkMention>, u64)> = persons
        .par_iter()
        .map(|(title, record)| {
            let mut merged: BTreeMap<&str, u32> = BTreeMap::new();
            let mut dropped = 0u64;
            for link in &record.links {
                let target = if persons.contains_key(&link.target) {
                    Some(link.target.as_str())
                } else {
                    redirects.get(&link.target).map(String::as_str)
                };
                match target {
                    Some(t) if t != title => *merged.entry(t).or_insert(0) += link.count,
                    Some(_) => {}
                    None => dropped += u64::from(link.count),
                }
            }
            let links = merged
                .into_iter()
                .map(|(target, count)| LinkMention { target: target.to_string(), count })
                .collect();
            (links, dropped)
        })
        .collect();
    let mut dropped = 0;
    for (record, (links, d)) in index.persons.values_mut().zip(resolved) {
        record.links = links;
        dropped += d;
    }
    dropped
}

/// Reclassifies every person with `lexicon`, from the stored term counts.
pub fn reclassify(index: &mut PeopleIndex, lexicon: &GenderLexicon) {
    for p in index.persons_mut() {
        p.gender = classify_terms(&p.terms, lexicon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chronology::Lifespan;

    fn page(title: &str, text: &str) -> Result<RawPage, IngestError> {
        Ok(RawPage::from_wikitext(title, 0, text.to_string()))
    }

    fn en() -> LanguageRules {
        LanguageRules::bundled("en").unwrap()
    }

    #[test]
    fn persons_redirects_and_resolution() {
        let pages = vec![
            page("Julius Caesar", "[[Category:100 BC births]] [[Category:44 BC deaths]] He ruled."),
            page("Caesar", "#REDIRECT [[Julius Caesar]]"),
            page("Cicero", "[[Caesar]] fought. [[Julius Caesar|Caesar]] won. [[Rome]]. [[Category:106 BC births]] [[Category:43 BC deaths]]"),
            page("Rome", "A city."),
            page("Nobody", "[[Category:Living people]]"),
        ];
        let (index, report) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        assert_eq!(index.len(), 2);
        assert_eq!(
            index.get("Cicero").unwrap().links,
            [LinkMention { target: "Julius Caesar".into(), count: 2 }]
        );
        assert_eq!(index.redirects().get("Caesar").map(String::as_str), Some("Julius Caesar"));
        assert_eq!(report.dropped_links, 1);
        assert_eq!(index.get("Julius Caesar").unwrap().lifespan, Some(Lifespan::years(-100, -44).unwrap()));
        assert_eq!(index.get("Julius Caesar").unwrap().gender.gender, crate::gender::Gender::Male);
    }

    #[test]
    fn later_duplicate_wins() {
        let pages = vec![
            page("A", "[[Category:10 births]]"),
            page("A", "[[Category:20 births]]"),
        ];
        let (index, report) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        assert_eq!(report.duplicates, 1);
        assert_eq!(index.get("A").unwrap().lifespan.unwrap().birth.value(), 20);
    }

    #[test]
    fn redirect_chains_are_dropped() {
        let pages = vec![
            page("P", "[[Category:10 births]]"),
            page("R1", "#REDIRECT [[R2]]"),
            page("R2", "#REDIRECT [[P]]"),
            page("Q", "[[R1]] [[R2]] [[Category:12 births]]"),
        ];
        let (index, report) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        assert_eq!(report.redirect_chains, 1);
        assert_eq!(index.get("Q").unwrap().links, [LinkMention { target: "P".into(), count: 1 }]);
    }

    #[test]
    fn contradictory_dates_leave_person_undated() {
        let pages = vec![page("X", "[[Category:50 births]] [[Category:20 deaths]]")];
        let (index, report) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        assert_eq!(report.undated, 1);
        assert!(index.get("X").unwrap().undated_reason.is_some());
    }

    #[test]
    fn strict_mode_propagates_line_errors() {
        let bad = || Err(IngestError::JsonlLine { line: 1, offset: 0, message: "x".into() });
        let pages = vec![bad(), page("A", "[[Category:10 births]]")];
        let (index, report) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        assert_eq!((index.len(), report.skipped), (1, 1));
        let pages = vec![bad(), page("A", "[[Category:10 births]]")];
        assert!(build_people_index(pages, &en(), IngestOptions { strict: true }).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let pages = vec![
            page("B", "[[A]] she [[Category:10 births]]"),
            page("A", "[[B]] [[Category:12 births]] [[Category:60 deaths]]"),
        ];
        let (index, _) = build_people_index(pages, &en(), IngestOptions::default()).unwrap();
        let mut buf = Vec::new();
        index.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().starts_with("{\"title\":\"A\""));
        let back = PeopleIndex::read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back.persons().collect::<Vec<_>>(), index.persons().collect::<Vec<_>>());
        assert!(matches!(
            PeopleIndex::read_jsonl(&b"{\"title\":1}\n"[..]),
            Err(IngestError::IndexRecord { line: 1, .. })
        ));
    }
}
