//! Command-line front end: batch classification, evaluation, ontology
//! inspection and resource preparation.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontotopic::baselines::{classify_exact, classify_tfidf_m, classify_w2vw, IdfTable, WindowConfig};
use ontotopic::classifier::{
    classify_semantic, classify_syntactic, combine, enhance, ClassifierConfig, CombinerConfig, Document,
    Enhancement, IdentificationEvent, ScoredTopic, SemanticConfig, SyntacticConfig,
};
use ontotopic::eval::{self, AnnotationRecord, EvalError, TopicRecord};
use ontotopic::textproc::{LexiconTagger, Stopwords, TextProcessor};
use ontotopic::{EmbeddingStore, Ontology, TopicId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_EVALUATION: i32 = 4;
pub const EXIT_UNKNOWN_LABEL: i32 = 5;

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ontotopic", version, about = "Classify research papers with topics from an ontology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate documents with ontology topics.
    Classify(ClassifyArgs),
    /// Score predictions against a gold standard.
    Evaluate(EvaluateArgs),
    /// Show a topic, its labels and its neighbours in the hierarchy.
    Inspect(InspectArgs),
    /// Compute an IDF table from a JSON-lines corpus.
    Idf(IdfArgs),
    /// Build a majority-vote gold standard from rater annotations.
    Gold(GoldArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Syntactic,
    Semantic,
    Both,
    Intersection,
    Exact,
    W2vw,
    Tfidf,
}

impl Mode {
    fn needs_embeddings(self) -> bool {
        matches!(self, Mode::Semantic | Mode::Both | Mode::Intersection | Mode::W2vw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    /// Ontology CSV (topic, relation, topic).
    #[arg(long)]
    pub ontology: PathBuf,
    /// Word embeddings in text format.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Stop-word list replacing the bundled English list.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// POS lexicon (token<TAB>tag) replacing the bundled one.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// IDF table for the tfidf mode.
    #[arg(long)]
    pub idf: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: Mode,
    /// Minimum Levenshtein ratio for syntactic matches.
    #[arg(long, default_value_t = 0.94)]
    pub msm: f64,
    /// Neighbours must be strictly more similar than this.
    #[arg(long, default_value_t = 0.7)]
    pub sim_threshold: f64,
    /// Neighbours fetched per n-gram.
    #[arg(long, default_value_t = 10)]
    pub top_similar: usize,
    /// Semantic topics among this many most frequent embedding tokens are dropped.
    #[arg(long, default_value_t = 3000)]
    pub filter_top_n: usize,
    #[arg(long, default_value = "direct")]
    pub enhancement: Enhancement,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Documents classified in parallel; output order is unaffected.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 10)]
    pub window_size: usize,
    #[arg(long, default_value_t = 5)]
    pub window_stride: usize,
    #[arg(long, default_value_t = 20)]
    pub window_top_similar: usize,
    #[arg(long, default_value_t = 0.6)]
    pub window_sim_threshold: f64,
    /// Ratio a label must exceed to map a TF-IDF term.
    #[arg(long, default_value_t = 0.8)]
    pub tfidf_threshold: f64,
    #[arg(long, default_value_t = 20)]
    pub tfidf_terms: usize,
    /// Write results here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON-lines documents, or a text file with the title on the first
    /// line; `-` reads standard input.
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ontology used to resolve and enrich topics.
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Score raw sets, without adding direct super-topics.
    #[arg(long)]
    pub no_enrich: bool,
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub ontology: PathBuf,
    /// Topic label or alternate label.
    pub label: String,
}

#[derive(Debug, Args)]
pub struct IdfArgs {
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON-lines corpus.
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct GoldArgs {
    #[arg(long)]
    pub ontology: PathBuf,
    /// Minimum raters per paper.
    #[arg(long, default_value_t = 3)]
    pub quorum: usize,
    /// JSON-lines {"paper_id","topics"} of extra topics shown to raters, counted
    /// as items for kappa.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// Where to write the gold-standard JSON lines.
    #[arg(long, short)]
    pub output: PathBuf,
    /// JSON-lines {"paper_id","rater","topics"}.
    pub annotations: PathBuf,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Classify(a) => cmd_classify(a, stdout, stderr),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Inspect(a) => cmd_inspect(a, stdout),
        Command::Idf(a) => cmd_idf(a, stdout),
        Command::Gold(a) => cmd_gold(a, stdout),
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    let result = if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map(|_| ())
    };
    result.map_err(|e| CliError::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn read_resource(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(EXIT_RESOURCE, format!("cannot read {}: {e}", path.display())))
}

fn resource_error(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::new(EXIT_RESOURCE, format!("{}: {e}", path.display()))
}

pub fn load_ontology(path: &Path) -> CliResult<Ontology> {
    Ontology::load_str(&read_resource(path)?).map_err(|e| resource_error(path, e))
}

fn load_text_processor(stoplist: Option<&Path>, lexicon: Option<&Path>) -> CliResult<TextProcessor> {
    let stopwords = match stoplist {
        Some(p) => Stopwords::parse(&read_resource(p)?),
        None => Stopwords::bundled(),
    };
    let tagger = match lexicon {
        Some(p) => LexiconTagger::parse(&read_resource(p)?).map_err(|e| resource_error(p, e))?,
        None => LexiconTagger::bundled(),
    };
    Ok(TextProcessor::new(stopwords, Box::new(tagger)))
}

/// A document to classify with its identifier.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct InputDocument {
    #[serde(default)]
    pub paper_id: Option<String>,
    #[serde(flatten)]
    pub document: Document,
}

/// Reads JSON lines, or a plain text file whose first line is the title.
pub fn parse_documents(text: &str, fallback_id: &str) -> CliResult<Vec<(String, Document)>> {
    let first = text.trim_start();
    if first.starts_with('{') {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: InputDocument = serde_json::from_str(line)
                .map_err(|e| CliError::new(EXIT_INPUT, format!("line {}: {e}", i + 1)))?;
            let id = doc.paper_id.unwrap_or_else(|| (out.len() + 1).to_string());
            out.push((id, doc.document));
        }
        return Ok(out);
    }
    let (title, body) = text.split_once('\n').unwrap_or((text, ""));
    Ok(vec![(fallback_id.to_string(), Document::new(title.trim(), body.trim(), &[]))])
}

/// Scored topic as emitted, without internal flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputScore {
    pub topic: TopicId,
    pub score: f64,
    pub frequency: usize,
    pub diversity: usize,
}

impl From<&ScoredTopic> for OutputScore {
    fn from(s: &ScoredTopic) -> Self {
        OutputScore {
            topic: s.topic.clone(),
            score: s.score,
            frequency: s.frequency,
            diversity: s.diversity,
        }
    }
}

/// One output line of `classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub paper_id: String,
    pub syntactic: BTreeSet<TopicId>,
    pub semantic: Vec<OutputScore>,
    pub union: BTreeSet<TopicId>,
    pub enhancement: BTreeSet<TopicId>,
    pub explanations: BTreeMap<TopicId, Vec<IdentificationEvent>>,
}

/// Loaded resources and settings for one `classify` run.
pub struct Pipeline {
    pub mode: Mode,
    pub ontology: Ontology,
    pub embeddings: Option<EmbeddingStore>,
    pub idf: Option<IdfTable>,
    pub text: TextProcessor,
    pub config: ClassifierConfig,
    pub windows: WindowConfig,
    pub tfidf_threshold: f64,
    pub tfidf_terms: usize,
}

impl Pipeline {
    pub fn from_args(a: &ClassifyArgs) -> CliResult<Self> {
        let config = ClassifierConfig {
            syntactic: SyntacticConfig {
                msm: a.msm,
                ..Default::default()
            },
            semantic: SemanticConfig {
                top_k: a.top_similar,
                sim_threshold: a.sim_threshold,
                ..Default::default()
            },
            combiner: CombinerConfig {
                generic_filter_n: a.filter_top_n,
                enhancement: a.enhancement,
            },
        };
        config.validate().map_err(|e| CliError::new(EXIT_INPUT, e.to_string()))?;
        let windows = WindowConfig {
            window_size: a.window_size,
            stride: a.window_stride,
            top_k: a.window_top_similar,
            sim_threshold: a.window_sim_threshold,
        };
        windows.validate().map_err(|e| CliError::new(EXIT_INPUT, e.to_string()))?;

        let r = &a.resources;
        let ontology = load_ontology(&r.ontology)?;
        let embeddings = match &r.embeddings {
            Some(p) => Some(EmbeddingStore::load_str(&read_resource(p)?).map_err(|e| resource_error(p, e))?),
            None if a.mode.needs_embeddings() => {
                return Err(CliError::new(EXIT_RESOURCE, format!("mode {:?} needs --embeddings", a.mode)))
            }
            None => None,
        };
        let idf = match &r.idf {
            Some(p) => Some(IdfTable::parse(&read_resource(p)?).map_err(|e| resource_error(p, e))?),
            None if a.mode == Mode::Tfidf => return Err(CliError::new(EXIT_RESOURCE, "mode tfidf needs --idf")),
            None => None,
        };
        let text = load_text_processor(r.stoplist.as_deref(), r.lexicon.as_deref())?;
        Ok(Pipeline {
            mode: a.mode,
            ontology,
            embeddings,
            idf,
            text,
            config,
            windows,
            tfidf_threshold: a.tfidf_threshold,
            tfidf_terms: a.tfidf_terms,
        })
    }

    fn store(&self) -> &EmbeddingStore {
        self.embeddings.as_ref().expect("embeddings checked at load")
    }

    pub fn classify(&self, paper_id: &str, doc: &Document) -> OutputRecord {
        let ont = &self.ontology;
        let cfg = &self.config;
        let mut record = OutputRecord {
            paper_id: paper_id.to_string(),
            syntactic: BTreeSet::new(),
            semantic: Vec::new(),
            union: BTreeSet::new(),
            enhancement: BTreeSet::new(),
            explanations: BTreeMap::new(),
        };
        match self.mode {
            Mode::Syntactic => {
                record.syntactic = classify_syntactic(doc, ont, &self.text, &cfg.syntactic);
                record.union = record.syntactic.clone();
            }
            Mode::Exact => {
                record.syntactic = classify_exact(doc, ont, &self.text, cfg.syntactic.max_n);
                record.union = record.syntactic.clone();
            }
            Mode::Semantic | Mode::Both | Mode::Intersection => {
                let syntactic = if self.mode == Mode::Semantic {
                    BTreeSet::new()
                } else {
                    classify_syntactic(doc, ont, &self.text, &cfg.syntactic)
                };
                let semantic = classify_semantic(doc, self.store(), ont, &self.text, &cfg.semantic);
                let combined = combine(&syntactic, &semantic, self.store(), ont, &cfg.combiner);
                record.union = if self.mode == Mode::Intersection {
                    let selected: BTreeSet<&TopicId> = semantic.selected.iter().map(|s| &s.topic).collect();
                    syntactic.iter().filter(|t| selected.contains(t)).cloned().collect()
                } else {
                    combined.union
                };
                record.syntactic = combined.syntactic;
                record.semantic = combined.semantic.iter().map(OutputScore::from).collect();
                record.explanations = combined.explanations;
            }
            Mode::W2vw => {
                let scored = classify_w2vw(doc, self.store(), ont, &self.text, &self.windows);
                record.union = scored.iter().map(|s| s.topic.clone()).collect();
                record.semantic = scored.iter().map(OutputScore::from).collect();
            }
            Mode::Tfidf => {
                let idf = self.idf.as_ref().expect("idf checked at load");
                record.union = classify_tfidf_m(doc, idf, ont, &self.text, self.tfidf_threshold, self.tfidf_terms);
            }
        }
        record.enhancement = enhance(&record.union, ont, cfg.combiner.enhancement);
        record
    }
}

/// Classifies `docs` on a pool of `workers` threads; results keep input order.
pub fn classify_batch(pipeline: &Pipeline, docs: &[(String, Document)], workers: usize) -> CliResult<Vec<OutputRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::new(EXIT_RESOURCE, format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| docs.par_iter().map(|(id, doc)| pipeline.classify(id, doc)).collect()))
}

fn join_topics(set: &BTreeSet<TopicId>) -> String {
    set.iter().map(TopicId::as_str).collect::<Vec<_>>().join(";")
}

pub fn write_records(records: &[OutputRecord], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Tsv => {
            writeln!(out, "paper_id\tsyntactic\tsemantic\tunion\tenhancement")?;
            for r in records {
                let semantic: Vec<&str> = r.semantic.iter().map(|s| s.topic.as_str()).collect();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    r.paper_id,
                    join_topics(&r.syntactic),
                    semantic.join(";"),
                    join_topics(&r.union),
                    join_topics(&r.enhancement)
                )?;
            }
        }
    }
    Ok(())
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::new(EXIT_INPUT, format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn write_failed(e: io::Error) -> CliError {
    CliError::new(EXIT_INPUT, format!("write failed: {e}"))
}

fn cmd_classify(a: &ClassifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let text = read_input(&a.input)?;
    let stem = a.input.file_stem().and_then(|s| s.to_str()).unwrap_or("document");
    let docs = parse_documents(&text, stem)?;
    let pipeline = Pipeline::from_args(a)?;
    for (id, doc) in &docs {
        if doc.is_blank() {
            let _ = writeln!(stderr, "warning: document {id} is empty");
        }
    }
    let records = classify_batch(&pipeline, &docs, a.workers)?;
    let mut out = open_output(a.output.as_deref(), stdout)?;
    write_records(&records, a.format, &mut out).map_err(write_failed)?;
    out.flush().map_err(write_failed)
}

fn evaluation_error(e: EvalError) -> CliError {
    match e {
        EvalError::Parse { .. } => CliError::new(EXIT_INPUT, e.to_string()),
        EvalError::Empty => CliError::new(EXIT_EVALUATION, "no predictions to evaluate"),
        _ => CliError::new(EXIT_EVALUATION, e.to_string()),
    }
}

fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = read_input(path)?;
    eval::parse_jsonl(&text).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

pub fn cmd_evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let predictions: Vec<TopicRecord> = read_records(&a.predictions)?;
    let gold: Vec<TopicRecord> = read_records(&a.gold)?;
    let ontology = a.ontology.as_deref().map(load_ontology).transpose()?;
    if !a.no_enrich && ontology.is_none() {
        return Err(CliError::new(EXIT_RESOURCE, "enrichment needs --ontology (or pass --no-enrich)"));
    }
    let report = eval::evaluate(&predictions, &gold, ontology.as_ref(), !a.no_enrich).map_err(evaluation_error)?;
    serde_json::to_writer_pretty(&mut *stdout, &report).map_err(|e| write_failed(e.into()))?;
    writeln!(stdout).map_err(write_failed)
}

#[derive(Debug, Serialize)]
struct TopicCard {
    id: TopicId,
    canonical_label: String,
    alternate_labels: BTreeSet<String>,
    equivalence_class: BTreeSet<TopicId>,
    direct_supers: BTreeSet<TopicId>,
    children: BTreeSet<TopicId>,
}

fn cmd_inspect(a: &InspectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let ont = load_ontology(&a.ontology)?;
    let id = eval::resolve_topic(&ont, &a.label)
        .ok_or_else(|| CliError::new(EXIT_UNKNOWN_LABEL, format!("unknown topic '{}'", a.label)))?;
    let lookup = |e: ontotopic::OntologyError| CliError::new(EXIT_RESOURCE, e.to_string());
    let topic = ont.topic(&id).map_err(lookup)?;
    let class = ont.equivalence_class(&id).map_err(lookup)?;
    let card = TopicCard {
        canonical_label: topic.canonical_label.clone(),
        alternate_labels: class
            .iter()
            .filter_map(|m| ont.topic(m).ok())
            .flat_map(|t| t.alternate_labels.iter().cloned())
            .collect(),
        equivalence_class: class.clone(),
        direct_supers: ont.direct_supers(&id).map_err(lookup)?,
        children: ont.direct_subs(&id).map_err(lookup)?,
        id,
    };
    serde_json::to_writer_pretty(&mut *stdout, &card).map_err(|e| write_failed(e.into()))?;
    writeln!(stdout).map_err(write_failed)
}

fn cmd_idf(a: &IdfArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = read_input(&a.corpus)?;
    let docs = parse_documents(&text, "document")?;
    let processor = load_text_processor(a.stoplist.as_deref(), None)?;
    let table = IdfTable::from_documents(docs.iter().map(|(_, d)| d), &processor);
    let mut out = open_output(a.output.as_deref(), stdout)?;
    table.write(&mut out).map_err(write_failed)?;
    out.flush().map_err(write_failed)
}

#[derive(Debug, Serialize)]
struct GoldSummary<'a> {
    papers: usize,
    kappa_mean: f64,
    kappa_sd: f64,
    agreement: &'a str,
    per_paper: BTreeMap<&'a str, f64>,
}

fn cmd_gold(a: &GoldArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let ont = load_ontology(&a.ontology)?;
    let annotations: Vec<AnnotationRecord> = read_records(&a.annotations)?;
    let mut candidates = BTreeMap::new();
    if let Some(p) = &a.candidates {
        for r in read_records::<TopicRecord>(p)? {
            candidates.insert(r.paper_id, r.topics.iter().map(|t| TopicId::new(t)).collect());
        }
    }
    let gold = eval::majority_gold(&annotations, &ont, a.quorum, &candidates).map_err(evaluation_error)?;
    let mut out = open_output(Some(&a.output), stdout)?;
    for r in gold.to_records() {
        serde_json::to_writer(&mut out, &r).map_err(|e| write_failed(e.into()))?;
        writeln!(out).map_err(write_failed)?;
    }
    out.flush().map_err(write_failed)?;
    drop(out);
    let summary = GoldSummary {
        papers: gold.papers.len(),
        kappa_mean: gold.kappa_mean,
        kappa_sd: gold.kappa_sd,
        agreement: &gold.agreement,
        per_paper: gold.papers.iter().map(|(k, v)| (k.as_str(), v.kappa)).collect(),
    };
    serde_json::to_writer_pretty(&mut *stdout, &summary).map_err(|e| write_failed(e.into()))?;
    writeln!(stdout).map_err(write_failed)
}
