//! Acceptance suite: one PASS/FAIL line per criterion on stdout, nonzero
//! exit if any criterion fails. Runs without the libtest harness so the
//! criteria execute sequentially and memory figures are not polluted by
//! concurrent tests.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, Read};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chronograph::chronology::{build_full_graph, Edge, Lifespan, PersonRecord, Year, PRESENT_YEAR};
use chronograph::gender::{read_labeled_texts, validate_accuracy, GenderLexicon};
use chronograph::ingest::wikitext::LinkMention;
use chronograph::ingest::{
    build_people_index, open_dump, parse_dump_stream, DumpFormat, IngestOptions, LanguageRules, PeopleIndex,
};
use chronograph::ranking::{ingroup_fraction, pagerank_edges, read_labeled_csv, PageRankParams};
use chronograph::wikinews::{
    aggregate_scores, betweenness, build_news_network, parse_news_index, read_articles, score_text, NewsGraph,
    SentimentLexicon, TextScores,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

// ---------------------------------------------------------------------------
// 1. PageRank against a dense power iteration
// ---------------------------------------------------------------------------

/// Dense oracle: column-stochastic matrix from summed weights, dangling
/// columns uniform, teleport (1-d)/n, iterated far past convergence.
fn dense_pagerank(n: usize, edges: &[Edge], d: f64) -> Vec<f64> {
    let mut w = vec![vec![0.0f64; n]; n];
    for e in edges {
        w[e.src][e.dst] += e.weight as f64;
    }
    let out: Vec<f64> = w.iter().map(|row| row.iter().sum()).collect();
    let mut m = vec![vec![0.0f64; n]; n]; // m[dst][src]
    for src in 0..n {
        for dst in 0..n {
            m[dst][src] = if out[src] > 0.0 { w[src][dst] / out[src] } else { 1.0 / n as f64 };
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let next: Vec<f64> = (0..n)
            .map(|i| (1.0 - d) / n as f64 + d * (0..n).map(|j| m[i][j] * x[j]).sum::<f64>())
            .collect();
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-16 {
            break;
        }
    }
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

fn criterion_pagerank() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut worst_sum = 0.0f64;
    for g in 0..200 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(0..=n * n);
        let edges: Vec<Edge> = (0..m)
            .map(|_| Edge {
                src: rng.gen_range(0..n),
                dst: rng.gen_range(0..n),
                weight: rng.gen_range(1..=5),
            })
            .collect();
        let d = if g % 4 == 0 { rng.gen_range(0.5..0.95) } else { 0.85 };
        let params = PageRankParams { damping: d, ..PageRankParams::default() };
        let got = pagerank_edges(n, &edges, &params).map_err(|e| format!("graph {g}: {e}"))?;
        check(got.converged, || format!("graph {g} did not converge"))?;
        let want = dense_pagerank(n, &edges, d);
        let linf = got.scores.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(linf);
        worst_sum = worst_sum.max((got.scores.iter().sum::<f64>() - 1.0).abs());
        check(linf <= 1e-8, || format!("graph {g} (n={n}): L-inf {linf:e}"))?;
    }
    check(worst_sum <= 1e-9, || format!("score sum off by {worst_sum:e}"))?;
    within(start.elapsed(), Duration::from_secs(10), "200 graphs")?;
    Ok(format!(
        "200 graphs, max L-inf {worst:.1e}, max |sum-1| {worst_sum:.1e}, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// 2. Temporal filter against all-pairs overlap
// ---------------------------------------------------------------------------

fn criterion_temporal_filter() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total_edges = 0usize;
    for pop in 0..50 {
        let n = rng.gen_range(1..=300);
        // Births fall in a window of varying width so overlaps are common
        // but not universal; some windows straddle the BC/AD boundary.
        let lo = rng.gen_range(-3000..=1900);
        let hi = (lo + rng.gen_range(50..=2000)).min(2019);
        // (title, (birth, death), [(link target index, count)])
        type Raw = (String, Option<(i32, Option<i32>)>, Vec<(usize, u32)>);
        let mut raw: Vec<Raw> = Vec::new();
        for i in 0..n {
            let dated = rng.gen_bool(0.9);
            let span = dated.then(|| {
                let mut birth = rng.gen_range(lo..=hi);
                if birth == 0 {
                    birth = 1;
                }
                let death = if rng.gen_bool(0.1) && birth > 1900 {
                    None
                } else {
                    let mut d = birth + rng.gen_range(0..=100);
                    if birth < 0 && d >= 0 {
                        d += 1; // skip year 0
                    }
                    Some(d)
                };
                (birth, death)
            });
            // Cluster links among nearby indices so some of them overlap.
            let k = rng.gen_range(0..=8);
            let mut targets = BTreeSet::new();
            for _ in 0..k {
                let t = if rng.gen_bool(0.7) {
                    (i as i64 + rng.gen_range(-5..=5)).clamp(0, n as i64 + 3) as usize
                } else {
                    rng.gen_range(0..n + 4) // indices >= n are non-person titles
                };
                targets.insert(t);
            }
            let links = targets.into_iter().map(|t| (t, rng.gen_range(1..=4))).collect();
            raw.push((format!("P{pop:02}-{i:03}"), span, links));
        }
        let title = |t: usize| format!("P{pop:02}-{t:03}");
        let records: Vec<PersonRecord> = raw
            .iter()
            .map(|(name, span, links)| {
                let mut r = PersonRecord::new(name.clone(), "en");
                r.lifespan = span.map(|(b, d)| {
                    Lifespan::new(Year::new(b).unwrap(), d.map(|d| Year::new(d).unwrap()), false).unwrap()
                });
                r.links = links
                    .iter()
                    .map(|&(t, c)| LinkMention { target: title(t), count: c })
                    .collect();
                r
            })
            .collect();
        let index = PeopleIndex::from_records(records);
        let graph = build_full_graph(&index);
        let got: BTreeSet<(String, String, u64)> =
            graph.edge_titles().map(|(a, b, w)| (a.to_string(), b.to_string(), w)).collect();

        // Brute force on plain integers: closed intervals, open lifespans end
        // at the present year.
        let by_title: HashMap<String, (i32, i32)> = raw
            .iter()
            .filter_map(|(name, span, _)| {
                span.map(|(b, d)| (name.clone(), (b, d.unwrap_or(b.max(PRESENT_YEAR)))))
            })
            .collect();
        let mut want = BTreeSet::new();
        for (a, _, links) in &raw {
            let Some(&(ab, ad)) = by_title.get(a) else { continue };
            for &(t, c) in links {
                let b = title(t);
                if b == *a {
                    continue;
                }
                if let Some(&(bb, bd)) = by_title.get(&b) {
                    if ab <= bd && bb <= ad {
                        want.insert((a.clone(), b, u64::from(c)));
                    }
                }
            }
        }
        check(got == want, || {
            let extra: Vec<_> = got.difference(&want).take(3).collect();
            let missing: Vec<_> = want.difference(&got).take(3).collect();
            format!("population {pop}: extra {extra:?}, missing {missing:?}")
        })?;
        total_edges += want.len();
    }
    within(start.elapsed(), Duration::from_secs(30), "50 populations")?;
    Ok(format!("50 populations, {total_edges} edges identical, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------------------
// 3. Plutarch neighbourhood
// ---------------------------------------------------------------------------

fn criterion_plutarch() -> Outcome {
    let path = common::fixtures().join("plutarch.jsonl");
    let pages = open_dump(&path, true).map_err(|e| e.to_string())?;
    let rules = LanguageRules::bundled("en").unwrap();
    let (index, _) = build_people_index(pages, &rules, IngestOptions { strict: true }).map_err(|e| e.to_string())?;
    let graph = build_full_graph(&index);
    let got: BTreeSet<(String, String)> =
        graph.edge_titles().map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
    let want: BTreeSet<(String, String)> = [
        ("Hadrian", "Plutarch"),
        ("Plutarch", "Hadrian"),
        ("Plutarch", "Lucius Aelius Caesar"),
        ("Plutarch", "Nero"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    check(got == want, || format!("edges {got:?}"))?;
    check(graph.node_count() == 7, || format!("expected all 7 persons dated, got {}", graph.node_count()))?;
    Ok("kept Hadrian, Caesar, Nero; dropped Pyrrhus, Syncellus, Pisani".into())
}

// ---------------------------------------------------------------------------
// 4. Gender accuracy
// ---------------------------------------------------------------------------

fn criterion_gender() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for lang in ["en", "de", "es", "pt"] {
        let path = common::fixtures().join(format!("gender_{lang}.jsonl"));
        let items = read_labeled_texts(BufReader::new(File::open(&path).map_err(|e| e.to_string())?))
            .map_err(|e| e.to_string())?;
        check(items.len() == 200, || format!("{lang}: {} items", items.len()))?;
        let acc = validate_accuracy(&items, &GenderLexicon::bundled(lang).unwrap()).map_err(|e| e.to_string())?;
        check(acc >= 0.9, || format!("{lang}: accuracy {acc:.3}"))?;
        parts.push(format!("{lang} {:.1}%", acc * 100.0));
    }
    within(start.elapsed(), Duration::from_secs(5), "gender validation")?;
    Ok(format!("{} ({:.2?})", parts.join(", "), start.elapsed()))
}

// ---------------------------------------------------------------------------
// 5. Betweenness against exhaustive shortest-path enumeration
// ---------------------------------------------------------------------------

/// Sums, over unordered pairs {s,t}, the share of shortest s-t paths that
/// pass through each vertex. Paths are enumerated explicitly.
fn exhaustive_betweenness(n: usize, adj: &[BTreeSet<usize>]) -> Vec<f64> {
    fn paths(adj: &[BTreeSet<usize>], at: usize, t: usize, seen: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == t {
            out.push(cur.clone());
            return;
        }
        for &next in &adj[at] {
            if !seen[next] {
                seen[next] = true;
                cur.push(next);
                paths(adj, next, t, seen, cur, out);
                cur.pop();
                seen[next] = false;
            }
        }
    }
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut all = Vec::new();
            let mut seen = vec![false; n];
            seen[s] = true;
            paths(adj, s, t, &mut seen, &mut vec![s], &mut all);
            let Some(min) = all.iter().map(Vec::len).min() else { continue };
            let shortest: Vec<&Vec<usize>> = all.iter().filter(|p| p.len() == min).collect();
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / shortest.len() as f64;
                }
            }
        }
    }
    bc
}

fn criterion_betweenness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut graphs: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for n in 1..=10usize {
        graphs.push((n, (1..n).map(|i| (i - 1, i)).collect())); // path
        graphs.push((n, (1..n).map(|i| (0, i)).collect())); // star
        graphs.push((n, (0..n).map(|i| (i, (i + 1) % n)).collect())); // cycle
        graphs.push((n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect())); // complete
    }
    for _ in 0..400 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.7);
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    e.push((a, b));
                }
            }
        }
        graphs.push((n, e));
    }
    let mut worst = 0.0f64;
    for (gi, (n, edges)) in graphs.iter().enumerate() {
        let titles: Vec<String> = (0..*n).map(|i| format!("N{i}")).collect();
        let weighted: Vec<(usize, usize, u64)> = edges.iter().map(|&(a, b)| (a, b, rng.gen_range(1..=3))).collect();
        let g = NewsGraph::from_edges(titles.clone(), &weighted);
        let got = betweenness(&g).map_err(|e| e.to_string())?;
        let mut adj = vec![BTreeSet::new(); *n];
        for &(a, b) in edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let want = exhaustive_betweenness(*n, &adj);
        for (i, t) in titles.iter().enumerate() {
            let pos = g.position(t).unwrap();
            let diff = (got[pos] - want[i]).abs();
            worst = worst.max(diff);
            check(diff <= 1e-9, || format!("graph {gi} node {t}: {} vs {}", got[pos], want[i]))?;
        }
    }
    Ok(format!("{} graphs up to 10 nodes, max error {worst:.1e}", graphs.len()))
}

// ---------------------------------------------------------------------------
// 6. In-group fractions of the hand-labeled leader lists
// ---------------------------------------------------------------------------

fn criterion_ingroup() -> Outcome {
    // (lang, politicians, religious, artists/scientists, in-group, fraction)
    let table = [
        ("en", 26, 11, 13, 10, 0.20),
        ("zh", 46, 1, 3, 48, 0.96),
        ("ja", 47, 0, 3, 31, 0.62),
        ("de", 23, 5, 22, 31, 0.62),
    ];
    let mut parts = Vec::new();
    for (lang, pol, rel, art, ing, frac) in table {
        let path = common::fixtures().join(format!("labeled_{lang}.csv"));
        let entries = read_labeled_csv(File::open(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let s = ingroup_fraction(&entries).map_err(|e| e.to_string())?;
        let got = (s.total, s.politician, s.religious, s.artist_scientist, s.in_group);
        check(got == (50, pol, rel, art, ing), || format!("{lang}: {got:?}"))?;
        check(s.fraction == frac, || format!("{lang}: fraction {}", s.fraction))?;
        parts.push(format!("{lang} {ing}/50={frac}"));
    }
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// 7. News scoring
// ---------------------------------------------------------------------------

fn criterion_news() -> Outcome {
    let lex = SentimentLexicon::bundled("en").unwrap();
    // Hand-computed: tokens fighting(-) killed(-) many peace(+) failed(-);
    // 1 positive, 3 negative, 5 tokens, 5 distinct, 29 letters.
    let a = score_text("Fighting killed many. Peace failed.", &lex).map_err(|e| e.to_string())?;
    let want_a = TextScores { sentiment: 0.25, emotionality: 0.8, complexity: 5.8 };
    check(a == want_a, || format!("text A scored {a:?}"))?;
    // war(-) war(-) peace(+): 2 distinct of 3 tokens, 11 letters.
    let b = score_text("War, war; peace!", &lex).map_err(|e| e.to_string())?;
    let want_b = TextScores { sentiment: 1.0 / 3.0, emotionality: 1.0, complexity: (2.0 / 3.0) * (11.0 / 3.0) };
    check(b == want_b, || format!("text B scored {b:?}"))?;
    // No lexicon hits: neutral sentiment, zero emotionality.
    let c = score_text("The committee met on Tuesday", &lex).map_err(|e| e.to_string())?;
    check(c.sentiment == 0.5 && c.emotionality == 0.0, || format!("text C scored {c:?}"))?;

    let dir = common::fixtures().join("news");
    let listing = std::fs::read_to_string(dir.join("listing_en.txt")).map_err(|e| e.to_string())?;
    let anchors = parse_news_index(&listing, "en").map_err(|e| e.to_string())?;
    let graph = build_news_network(&anchors);
    let texts = read_articles(&dir.join("articles"), graph.nodes()).map_err(|e| e.to_string())?;
    let report = aggregate_scores(&graph, &texts, &lex, 5).map_err(|e| e.to_string())?;
    let mean = report.mean.sentiment;
    check(mean < 0.5, || format!("fixture mean sentiment {mean}"))?;
    Ok(format!(
        "hand-computed scores exact; fixture mean sentiment {mean:.3} over {} articles",
        report.scored
    ))
}

// ---------------------------------------------------------------------------
// 8. End-to-end determinism and golden files
// ---------------------------------------------------------------------------

fn criterion_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ra = common::run_fixture_pipeline(a.path());
    let rb = common::run_fixture_pipeline(b.path());
    check(ra.outputs == rb.outputs, || "manifest output digests differ between runs".into())?;
    let ta = common::read_tree(a.path());
    let tb = common::read_tree(b.path());
    check(ta == tb, || {
        let diff: Vec<_> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).take(5).collect();
        format!("artifacts differ: {diff:?}")
    })?;
    check(ta.len() == ra.outputs.len(), || {
        format!("{} files on disk, {} in manifest", ta.len(), ra.outputs.len())
    })?;
    let bad = common::check_golden(&ta);
    check(bad.is_empty(), || format!("golden mismatch: {bad:?}"))?;
    Ok(format!("{} artifacts byte-identical across runs and golden files", ta.len()))
}

// ---------------------------------------------------------------------------
// 9. Streaming scale
// ---------------------------------------------------------------------------

const SCALE_BYTES: u64 = 1_000_000_000;

/// A MediaWiki XML stream made of renamed, padded copies of the fixture
/// pages, produced lazily so the input itself never sits in memory.
struct RepeatedDump {
    pages: Vec<(String, String)>,
    pad: String,
    buf: Vec<u8>,
    pos: usize,
    produced: u64,
    next: usize,
    done: bool,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl RepeatedDump {
    fn new(pages: Vec<(String, String)>) -> Self {
        let pad = "The chronicle records further events of the period in considerable detail. ".repeat(160);
        let head = "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\">\n".as_bytes().to_vec();
        Self { pages, pad, buf: head, pos: 0, produced: 0, next: 0, done: false }
    }

    fn refill(&mut self) {
        self.buf.clear();
        self.pos = 0;
        if self.done {
            return;
        }
        if self.produced >= SCALE_BYTES {
            self.buf.extend_from_slice(b"</mediawiki>\n");
            self.done = true;
            return;
        }
        let copy = self.next / self.pages.len();
        let (title, text) = &self.pages[self.next % self.pages.len()];
        self.next += 1;
        // Links point into the same copy so the graph keeps its shape.
        let text = text.replace("[[", "[[#").replace("[[#Category:", "[[Category:");
        let text = text.replace("[[#", &format!("[[C{copy} "));
        let body = format!("{text}\n\n{}", self.pad);
        let page = format!(
            "  <page>\n    <title>C{copy} {}</title>\n    <ns>0</ns>\n    <revision>\n      <text xml:space=\"preserve\">{}</text>\n    </revision>\n  </page>\n",
            xml_escape(title),
            xml_escape(&body)
        );
        self.buf.extend_from_slice(page.as_bytes());
    }
}

impl Read for RepeatedDump {
    fn read(&mut self, out: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.buf.len() {
            self.refill();
            if self.buf.is_empty() {
                return Ok(0);
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        self.produced += n as u64;
        Ok(n)
    }
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn criterion_streaming() -> Outcome {
    let dump = common::fixtures().join("dump_60.xml");
    let reader = BufReader::new(File::open(&dump).map_err(|e| e.to_string())?);
    let pages: Vec<(String, String)> = parse_dump_stream(reader, DumpFormat::Xml, true)
        .filter_map(Result::ok)
        .filter(|p| p.redirect.is_none())
        .map(|p| (p.title, p.wikitext))
        .collect();
    let source = BufReader::with_capacity(1 << 16, RepeatedDump::new(pages));
    let stream = parse_dump_stream(source, DumpFormat::Xml, false);
    let rules = LanguageRules::bundled("en").unwrap();
    let start = Instant::now();
    let (index, report) = build_people_index(stream, &rules, IngestOptions::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let mb_per_s = SCALE_BYTES as f64 / 1e6 / secs;
    let peak = peak_rss_bytes().ok_or("VmHWM unavailable")?;
    let peak_mb = peak as f64 / 1e6;
    let summary = format!(
        "{} pages, {} persons, {mb_per_s:.0} MB/s, peak RSS {peak_mb:.0} MB",
        report.pages,
        index.len()
    );
    check(report.persons > 50_000, || format!("too few persons: {summary}"))?;
    check(peak_mb < 500.0, || format!("memory bound exceeded: {summary}"))?;
    check(mb_per_s >= 20.0, || format!("throughput below 20 MB/s: {summary}"))?;
    Ok(summary)
}

fn main() {
    // Only the named criteria run when arguments are given, e.g. `-- 1 3`.
    let only: BTreeSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    type Criterion = (usize, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "PageRank oracle equivalence", criterion_pagerank),
        (2, "temporal filter equivalence", criterion_temporal_filter),
        (3, "Plutarch neighbourhood", criterion_plutarch),
        (4, "gender accuracy", criterion_gender),
        (5, "betweenness oracle equivalence", criterion_betweenness),
        (6, "in-group fractions", criterion_ingroup),
        (7, "news scoring", criterion_news),
        (8, "end-to-end determinism", criterion_determinism),
        (9, "streaming scale", criterion_streaming),
    ];
    let mut results: BTreeMap<usize, bool> = BTreeMap::new();
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match &outcome {
            Ok(detail) => println!("criterion {id} [{name}]: PASS: {detail}"),
            Err(why) => println!("criterion {id} [{name}]: FAIL: {why}"),
        }
        results.insert(id, outcome.is_ok());
    }
    let failed: Vec<_> = results.iter().filter(|(_, ok)| !**ok).map(|(id, _)| *id).collect();
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
