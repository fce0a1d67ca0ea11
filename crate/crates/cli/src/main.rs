//! `chronograph`: command-line front end for the people-network pipeline.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chronograph::chronology::{build_slice, Year};
use chronograph::export::GraphFormat;
use chronograph::gender::{read_labeled_texts, validate_accuracy, GenderLexicon};
use chronograph::ingest::LanguageRules;
use chronograph::pipeline::{
    gender_stage, graph_stage, ingest_stage, news_stage, rank_stage, read_graph, read_index, run_pipeline,
    Outputs, PipelineConfig, PipelineError, RankOptions, SliceSpec, Stage,
};
use chronograph::ranking::{ingroup_fraction, read_labeled_csv, CategoryRules, PageRankParams, SphereRules};
use chronograph::wikinews::{build_news_network, fetch_articles, parse_news_index, FetchOptions, SentimentLexicon};

#[derive(Parser)]
#[command(name = "chronograph", version, about = "Lifetime-overlap people networks from Wikipedia dumps")]
struct Cli {
    /// More log output on stderr (-v debug, -vv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only warnings and errors on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream a dump (XML or JSONL, optionally gzip/bzip2) into a people index.
    Ingest(IngestArgs),
    /// Build the lifetime-overlap graph and optional per-year slices.
    Graph(GraphArgs),
    /// Rank persons by PageRank and label the leaders.
    Rank(RankArgs),
    /// In-group statistics of a hand-labeled ranking CSV.
    Ingroup {
        #[arg(long)]
        labeled: PathBuf,
    },
    /// Gender classification and the yearly share of women.
    #[command(subcommand)]
    Gender(GenderCommand),
    /// Wikinews topic networks and article scores.
    #[command(subcommand)]
    News(NewsCommand),
    /// Run several stages from a JSON config.
    Run(RunArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    dump: PathBuf,
    #[arg(long, default_value = "en")]
    lang: String,
    /// Detection rules JSON; defaults to the bundled rules for `--lang`.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Gender lexicon JSON overriding the one in the rules.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Fail on the first malformed record instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SliceArgs {
    #[arg(long, allow_hyphen_values = true, requires_all = ["slice_to", "slice_step"])]
    slice_from: Option<i32>,
    #[arg(long, allow_hyphen_values = true, requires = "slice_from")]
    slice_to: Option<i32>,
    #[arg(long, requires = "slice_from")]
    slice_step: Option<u32>,
}

impl SliceArgs {
    fn spec(&self) -> Option<SliceSpec> {
        Some(SliceSpec {
            from: self.slice_from?,
            to: self.slice_to?,
            step: self.slice_step?,
        })
    }
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    slices: SliceArgs,
    /// Comma-separated export formats.
    #[arg(long, value_delimiter = ',', default_value = "graphml,dot,edge_csv")]
    format: Vec<GraphFormat>,
}

#[derive(Args)]
struct PageRankArgs {
    #[arg(long, default_value_t = PageRankParams::default().damping)]
    damping: f64,
    #[arg(long, default_value_t = PageRankParams::default().epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = PageRankParams::default().max_iter)]
    max_iter: u32,
}

impl PageRankArgs {
    fn params(&self) -> PageRankParams {
        PageRankParams {
            damping: self.damping,
            epsilon: self.epsilon,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Args)]
struct RankArgs {
    /// Native graph file written by `graph`.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 50)]
    top: usize,
    #[command(flatten)]
    pagerank: PageRankArgs,
    /// Rank the slice of persons alive in this year instead of the whole graph.
    #[arg(long, allow_hyphen_values = true)]
    year: Option<i32>,
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Sphere rules JSON; defaults to the bundled rules for `--lang`.
    #[arg(long)]
    sphere: Option<PathBuf>,
    #[arg(long, default_value = "en")]
    lang: String,
    #[command(flatten)]
    slices: SliceArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum GenderCommand {
    /// Yearly share of women among persons alive, as CSV.
    Series {
        #[arg(long)]
        index: PathBuf,
        /// Reclassify every person with this lexicon first.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1900)]
        from: i32,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2000)]
        to: i32,
        /// Restrict each year to the top K of its slice by PageRank.
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accuracy of the classifier on labeled JSONL texts.
    Validate {
        #[arg(long)]
        labeled: PathBuf,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NewsCommand {
    /// Build the topic network of a listing and score its articles.
    Analyze {
        #[arg(long)]
        listing: PathBuf,
        /// Directory of article texts named by `article_filename`.
        #[arg(long)]
        articles: PathBuf,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Download the Wikipedia articles linked from a listing.
    Fetch {
        /// Listing wikitext; its linked titles are fetched.
        #[arg(long, conflicts_with = "titles", required_unless_present = "titles")]
        listing: Option<PathBuf>,
        /// File with one title per line.
        #[arg(long)]
        titles: Option<PathBuf>,
        #[arg(long, default_value = "en")]
        lang: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        rps: f64,
        #[arg(long, default_value_t = 2)]
        concurrency: usize,
        /// Page URL prefix; defaults to the language's Wikipedia.
        #[arg(long)]
        base_url: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated subset of ingest,graph,rank,gender,news.
    #[arg(long, default_value = "ingest,graph,rank,gender")]
    stages: String,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    lang: Option<String>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    strict: bool,
}

fn input(path: &Path, stage: Stage) -> Result<(), PipelineError> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingInput {
            stage,
            path: path.to_path_buf(),
        })
    }
}

fn bad_input(path: &Path, e: impl ToString) -> PipelineError {
    PipelineError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), PipelineError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(std::io::Error::from)
        .and_then(|_| writeln!(out))
        .map_err(|e| PipelineError::io(Path::new("<stdout>"), e))
}

fn split_parent(path: &Path) -> (PathBuf, PathBuf) {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    (parent.to_path_buf(), PathBuf::from(path.file_name().unwrap_or_default()))
}

fn sentiment_lexicon(path: Option<&Path>, lang: &str) -> Result<SentimentLexicon, PipelineError> {
    match path {
        Some(p) => {
            input(p, Stage::News)?;
            SentimentLexicon::load(p).map_err(|e| bad_input(p, e))
        }
        None => SentimentLexicon::bundled(lang)
            .ok_or_else(|| PipelineError::Config(format!("no bundled sentiment lexicon for {lang:?}; pass --lexicon"))),
    }
}

fn gender_lexicon(path: Option<&Path>) -> Result<Option<GenderLexicon>, PipelineError> {
    path.map(|p| {
        input(p, Stage::Gender)?;
        GenderLexicon::load(p).map_err(|e| bad_input(p, e))
    })
    .transpose()
}

fn cmd_ingest(a: IngestArgs) -> Result<(), PipelineError> {
    input(&a.dump, Stage::Ingest)?;
    let mut rules = match &a.rules {
        Some(p) => {
            input(p, Stage::Ingest)?;
            LanguageRules::load(p).map_err(|e| bad_input(p, e))?
        }
        None => LanguageRules::bundled(&a.lang)
            .ok_or_else(|| PipelineError::Config(format!("no bundled rules for {:?}; pass --rules", a.lang)))?,
    };
    if let Some(lex) = gender_lexicon(a.lexicon.as_deref())? {
        rules.lexicon = Some(lex);
    }
    let (dir, name) = split_parent(&a.out);
    let mut outputs = Outputs::new(dir);
    let (_, report) = ingest_stage(&a.dump, &rules, a.strict, &name, &mut outputs)?;
    print_json(&report)
}

fn cmd_graph(a: GraphArgs) -> Result<(), PipelineError> {
    input(&a.index, Stage::Graph)?;
    if a.format.is_empty() {
        return Err(PipelineError::Config("no export format".into()));
    }
    let slices = a.slices.spec();
    if let Some(s) = &slices {
        s.years()?;
    }
    let index = read_index(&a.index)?;
    let mut outputs = Outputs::new(&a.out_dir);
    let (_, report) = graph_stage(&index, slices.as_ref(), &a.format, &mut outputs)?;
    print_json(&report)
}

fn cmd_rank(a: RankArgs) -> Result<(), PipelineError> {
    let params = a.pagerank.params();
    params.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
    if a.top == 0 {
        return Err(PipelineError::Config("--top must be at least 1".into()));
    }
    input(&a.graph, Stage::Rank)?;
    let categories = match &a.categories {
        Some(p) => {
            input(p, Stage::Rank)?;
            CategoryRules::load(p).map_err(|e| bad_input(p, e))?
        }
        None => CategoryRules::bundled(),
    };
    let sphere = match &a.sphere {
        Some(p) => {
            input(p, Stage::Rank)?;
            Some(SphereRules::load(p).map_err(|e| bad_input(p, e))?)
        }
        None => SphereRules::bundled(&a.lang),
    };
    let slices = a.slices.spec();
    if let Some(s) = &slices {
        s.years()?;
    }
    let mut graph = read_graph(&a.graph)?;
    if let Some(y) = a.year {
        let year = Year::new(y).map_err(|e| PipelineError::Config(format!("--year: {e}")))?;
        graph = build_slice(&graph, year).map_err(|e| PipelineError::Config(format!("--year: {e}")))?;
    }
    let options = RankOptions {
        top: a.top,
        params,
        categories: &categories,
        sphere: sphere.as_ref(),
        slices: slices.as_ref(),
    };
    let mut outputs = Outputs::new(&a.out_dir);
    let report = rank_stage(&graph, &options, &mut outputs)?;
    print_json(&report)
}

fn cmd_ingroup(labeled: &Path) -> Result<(), PipelineError> {
    input(labeled, Stage::Rank)?;
    let f = std::fs::File::open(labeled).map_err(|e| PipelineError::io(labeled, e))?;
    let entries = read_labeled_csv(BufReader::new(f)).map_err(|e| bad_input(labeled, e))?;
    let stats = ingroup_fraction(&entries).map_err(|e| bad_input(labeled, e))?;
    print_json(&stats)
}

fn cmd_gender(c: GenderCommand) -> Result<(), PipelineError> {
    match c {
        GenderCommand::Series {
            index,
            lexicon,
            from,
            to,
            top_k,
            out,
        } => {
            input(&index, Stage::Gender)?;
            let lex = gender_lexicon(lexicon.as_deref())?;
            let year = |v| Year::new(v).map_err(|e| PipelineError::Config(e.to_string()));
            let range = (year(from)?, year(to)?);
            if range.0 > range.1 {
                return Err(PipelineError::Config(format!("--from {from} is after --to {to}")));
            }
            if top_k == Some(0) {
                return Err(PipelineError::Config("--top-k must be at least 1".into()));
            }
            let mut idx = read_index(&index)?;
            let (dir, name) = split_parent(&out);
            let mut outputs = Outputs::new(dir);
            let top = top_k.map(|k| (k, PageRankParams::default()));
            let report = gender_stage(&mut idx, lex.as_ref(), range, top, &name, &mut outputs)?;
            print_json(&report)
        }
        GenderCommand::Validate { labeled, lang, lexicon } => {
            input(&labeled, Stage::Gender)?;
            let lex = match gender_lexicon(lexicon.as_deref())? {
                Some(l) => l,
                None => GenderLexicon::bundled(&lang)
                    .ok_or_else(|| PipelineError::Config(format!("no bundled gender lexicon for {lang:?}")))?,
            };
            let f = std::fs::File::open(&labeled).map_err(|e| PipelineError::io(&labeled, e))?;
            let items = read_labeled_texts(BufReader::new(f)).map_err(|e| bad_input(&labeled, e))?;
            let accuracy = validate_accuracy(&items, &lex).map_err(|e| bad_input(&labeled, e))?;
            print_json(&serde_json::json!({ "lang": lex.lang, "items": items.len(), "accuracy": accuracy }))
        }
    }
}

fn cmd_news(c: NewsCommand) -> Result<(), PipelineError> {
    match c {
        NewsCommand::Analyze {
            listing,
            articles,
            lang,
            lexicon,
            top,
            out_dir,
        } => {
            input(&listing, Stage::News)?;
            input(&articles, Stage::News)?;
            let lex = sentiment_lexicon(lexicon.as_deref(), &lang)?;
            let mut outputs = Outputs::new(&out_dir);
            let report = news_stage(&listing, &articles, &lang, &lex, top, &mut outputs)?;
            print_json(&report)
        }
        NewsCommand::Fetch {
            listing,
            titles,
            lang,
            out,
            rps,
            concurrency,
            base_url,
        } => {
            let titles: Vec<String> = match (listing, titles) {
                (Some(p), _) => {
                    input(&p, Stage::News)?;
                    let text = std::fs::read_to_string(&p).map_err(|e| PipelineError::io(&p, e))?;
                    let anchors = parse_news_index(&text, &lang).map_err(|e| bad_input(&p, e))?;
                    build_news_network(&anchors).nodes().to_vec()
                }
                (None, Some(p)) => {
                    input(&p, Stage::News)?;
                    let f = std::fs::File::open(&p).map_err(|e| PipelineError::io(&p, e))?;
                    BufReader::new(f)
                        .lines()
                        .map(|l| l.map_err(|e| PipelineError::io(&p, e)))
                        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
                        .map(|l| l.map(|s| s.trim().to_string()))
                        .collect::<Result<_, _>>()?
                }
                (None, None) => unreachable!("clap requires one of --listing, --titles"),
            };
            let mut options = FetchOptions::for_language(&lang);
            options.requests_per_second = rps;
            options.concurrency = concurrency;
            if let Some(b) = base_url {
                options.base_url = b;
            }
            let report = fetch_articles(&titles, &out, &options).map_err(|e| PipelineError::Stage {
                stage: Stage::News,
                message: e.to_string(),
            })?;
            for (title, why) in &report.failed {
                log::warn!("{title}: {why}");
            }
            print_json(&report)
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<(), PipelineError> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    if let Some(d) = a.out_dir {
        cfg.out_dir = d;
    }
    if let Some(d) = a.dump {
        cfg.dump = Some(d);
    }
    if let Some(l) = a.lang {
        cfg.lang = l;
    }
    if let Some(k) = a.top_k {
        cfg.top_k = k;
    }
    if let Some(d) = a.damping {
        cfg.pagerank.damping = d;
    }
    cfg.strict |= a.strict;
    let stages = Stage::parse_list(&a.stages)?;
    let report = run_pipeline(&cfg, &stages)?;
    print_json(&report.outputs)
}

fn init_logging(cli: &Cli) {
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp_millis()
        .target(env_logger::Target::Stderr)
        .init();
}

/// `CHRONOGRAPH_THREADS` caps the worker pool; unset or 0 means one per core.
fn init_threads() -> Result<(), PipelineError> {
    let Ok(v) = std::env::var("CHRONOGRAPH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| PipelineError::Config(format!("CHRONOGRAPH_THREADS={v:?} is not a number")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        log::debug!("using {n} worker threads");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(&cli);
    let result = init_threads().and_then(|()| match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Ingroup { labeled } => cmd_ingroup(&labeled),
        Command::Gender(c) => cmd_gender(c),
        Command::News(c) => cmd_news(c),
        Command::Run(a) => cmd_run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
