//! Command-line front end. Every subcommand reads and writes its artifacts
//! under `--output-dir`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{ingest_corpus, load_stopwords, FieldCorpus, Lexicon, SlotCounts, TokenizerConfig};
use crate::error::{Error, Result};
use crate::eval::{
    baseline_scores, compare_methods, load_annotations, model_scores, train_separate_baseline, METHOD_MODEL_COSINE,
    METHOD_MODEL_JS, METHOD_SEPARATE_JS,
};
use crate::fmt::{read_to_string, write_atomic};
use crate::metrics::{neighbors_tsv, term_variation_tsv, Analysis, Direction, DisMode, TermVariation};
use crate::model::{parse_key_values, read_binary, write_binary, write_text, EmbeddingTable, Hyperparams, Trainer};
use crate::project::{coords_tsv, project_terms};
use crate::synth::{generate, SynthSpec};

pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const FIELD_TERMS_FILE: &str = "field_terms.tsv";
pub const VOCAB_CONF_FILE: &str = "vocab.conf";
pub const TRAIN_CONF_FILE: &str = "train.conf";
pub const EMBEDDINGS_TEXT_FILE: &str = "embeddings.txt";
pub const EMBEDDINGS_BIN_FILE: &str = "embeddings.bin";
pub const FREQUENCIES_FILE: &str = "frequencies.tsv";
pub const TERM_VARIATION_FILE: &str = "term_variation.tsv";
pub const NEIGHBORS_FILE: &str = "neighbors.tsv";
pub const FIELD_CSV_FILE: &str = "field_distance.csv";
pub const FIELD_SVG_FILE: &str = "field_distance.svg";
pub const EVAL_FILE: &str = "eval.tsv";

#[derive(Debug, Parser)]
#[command(name = "termshift", version, about = "Field-localized word embeddings and cross-field term variation")]
pub struct Cli {
    /// Directory holding every artifact.
    #[arg(short, long, global = true, default_value = "out")]
    pub output_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select field terms from titles and build the global vocabulary.
    BuildVocab(BuildVocabArgs),
    /// Train the field-localized embedding model.
    Train(TrainArgs),
    /// Report per-term variation across fields.
    TermVar(TermVarArgs),
    /// List nearest neighbors of a term in one field.
    Neighbors(NeighborsArgs),
    /// Field-to-field distance matrix and heatmap.
    FieldVar(FieldVarArgs),
    /// Compare term variation with annotations.
    Eval(EvalArgs),
    /// 2-D PCA coordinates of term embeddings.
    Project(ProjectArgs),
    /// Generate a synthetic corpus with planted terms.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BuildVocabArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub stopwords: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub terms_per_field: usize,
    /// Minimum corpus count for a global word.
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// `key = value` hyperparameter file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single worker, bit-reproducible output.
    #[arg(long)]
    pub deterministic: bool,
    /// Overrides the config's worker count.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Cardinality,
    Weighted,
}

impl From<ModeArg> for DisMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cardinality => DisMode::Cardinality,
            ModeArg::Weighted => DisMode::Weighted,
        }
    }
}

#[derive(Debug, Args)]
pub struct TermVarArgs {
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "cardinality")]
    pub mode: ModeArg,
    /// Report a single term.
    #[arg(long, conflicts_with_all = ["top", "bottom"])]
    pub term: Option<String>,
    /// Keep the N most varied terms.
    #[arg(long)]
    pub top: Option<usize>,
    /// Keep the N least varied terms.
    #[arg(long)]
    pub bottom: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NeighborsArgs {
    #[arg(long)]
    pub term: String,
    /// Required for field terms, ignored for global words.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct FieldVarArgs {
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    /// Emit the directed matrix instead of the symmetrized one.
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaselineArg {
    SeparateCbow,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "30,50")]
    pub ndcg_ranks: Vec<usize>,
    #[arg(long, value_enum)]
    pub baseline: Option<BaselineArg>,
    #[arg(long, default_value_t = 10_000)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "cardinality")]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Terms,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long, value_enum, default_value = "terms")]
    pub scope: ScopeArg,
    /// Relative paths resolve inside the output directory.
    #[arg(long, default_value = "coords.tsv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to `<output-dir>/corpus`.
    #[arg(long)]
    pub dest: Option<PathBuf>,
}

/// Corpus location and vocabulary settings recorded by `build-vocab`.
struct VocabConfig {
    corpus: PathBuf,
    min_count: u64,
    terms_per_field: usize,
}

impl VocabConfig {
    fn to_config(&self) -> String {
        format!(
            "corpus = {}\nterms_per_field = {}\nmin_count = {}\n",
            self.corpus.display(),
            self.terms_per_field,
            self.min_count
        )
    }

    fn load(out: &Path) -> Result<Self> {
        let path = out.join(VOCAB_CONF_FILE);
        if !path.is_file() {
            return Err(Error::Invalid(format!("{} not found; run build-vocab first", path.display())));
        }
        let mut corpus = None;
        let mut min_count = None;
        let mut terms_per_field = None;
        for (k, v) in parse_key_values(&read_to_string(&path)?)? {
            let bad = || Error::parse("vocab config", format!("bad value for {k}: {v:?}"));
            match k.as_str() {
                "corpus" => corpus = Some(PathBuf::from(&v)),
                "min_count" => min_count = Some(v.parse().map_err(|_| bad())?),
                "terms_per_field" => terms_per_field = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(Error::parse("vocab config", format!("unknown key {k}"))),
            }
        }
        let missing = |k: &str| Error::parse("vocab config", format!("missing {k}"));
        Ok(VocabConfig {
            corpus: corpus.ok_or_else(|| missing("corpus"))?,
            min_count: min_count.ok_or_else(|| missing("min_count"))?,
            terms_per_field: terms_per_field.ok_or_else(|| missing("terms_per_field"))?,
        })
    }
}

fn load_lexicon(out: &Path) -> Result<Lexicon> {
    let lex_path = out.join(LEXICON_FILE);
    if !lex_path.is_file() {
        return Err(Error::Invalid(format!("{} not found; run build-vocab first", lex_path.display())));
    }
    let terms_path = out.join(FIELD_TERMS_FILE);
    let terms = if terms_path.is_file() { Some(read_to_string(&terms_path)?) } else { None };
    Lexicon::from_tsv(&read_to_string(&lex_path)?, terms.as_deref())
}

/// A trained model loaded back from the output directory.
struct Model {
    lexicon: Lexicon,
    table: EmbeddingTable,
}

impl Model {
    fn load(out: &Path) -> Result<Self> {
        let bin = out.join(EMBEDDINGS_BIN_FILE);
        if !bin.is_file() {
            return Err(Error::ModelNotFound(bin));
        }
        let lexicon = load_lexicon(out)?;
        let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
        let table = read_binary(&bytes, &lexicon)?;
        Ok(Model { lexicon, table })
    }

    fn counts(&self, out: &Path) -> Result<SlotCounts> {
        SlotCounts::from_tsv(&read_to_string(&out.join(FREQUENCIES_FILE))?, &self.lexicon)
    }
}

fn load_trained_hyperparams(out: &Path) -> Result<Hyperparams> {
    Hyperparams::from_config(&read_to_string(&out.join(TRAIN_CONF_FILE))?)
}

fn ingest(vocab: &VocabConfig) -> Result<Vec<FieldCorpus>> {
    ingest_corpus(&vocab.corpus, &TokenizerConfig::default())
}

/// Runs one subcommand and returns its one-line summary.
pub fn run(cli: Cli) -> Result<String> {
    let out = cli.output_dir.as_path();
    match cli.command {
        Command::BuildVocab(a) => build_vocab(out, a),
        Command::Train(a) => train_cmd(out, a),
        Command::TermVar(a) => term_var(out, a),
        Command::Neighbors(a) => neighbors(out, a),
        Command::FieldVar(a) => field_var(out, a),
        Command::Eval(a) => eval_cmd(out, a),
        Command::Project(a) => project(out, a),
        Command::Synth(a) => synth(out, a),
    }
}

fn build_vocab(out: &Path, a: BuildVocabArgs) -> Result<String> {
    if a.terms_per_field == 0 {
        return Err(Error::Invalid("--terms-per-field must be at least 1".into()));
    }
    let corpus = fs::canonicalize(&a.corpus).map_err(|e| Error::io(&a.corpus, e))?;
    let corpora = ingest_corpus(&corpus, &TokenizerConfig::default())?;
    let stopwords = load_stopwords(&a.stopwords)?;
    let lexicon = Lexicon::from_corpora(&corpora, &stopwords, a.terms_per_field, a.min_count)?;
    write_atomic(&out.join(LEXICON_FILE), lexicon.to_tsv().as_bytes())?;
    write_atomic(&out.join(FIELD_TERMS_FILE), lexicon.field_terms_tsv().as_bytes())?;
    let conf = VocabConfig { corpus, min_count: a.min_count, terms_per_field: a.terms_per_field };
    write_atomic(&out.join(VOCAB_CONF_FILE), conf.to_config().as_bytes())?;
    Ok(format!(
        "{} fields, {} global words, {} field terms, {} slots -> {}",
        lexicon.field_count(),
        lexicon.global_words().len(),
        lexicon.terms().len(),
        lexicon.slot_count(),
        out.join(LEXICON_FILE).display()
    ))
}

fn train_cmd(out: &Path, a: TrainArgs) -> Result<String> {
    let mut hp = match &a.config {
        Some(path) => Hyperparams::from_config(&read_to_string(path)?)?,
        None => Hyperparams::default(),
    };
    if let Some(w) = a.workers {
        hp.workers = w;
    }
    if a.deterministic {
        hp.workers = 1;
    }
    hp.validate()?;
    let vocab = VocabConfig::load(out)?;
    let lexicon = load_lexicon(out)?;
    let corpora = ingest(&vocab)?;
    let trainer = Trainer::new(&corpora, &lexicon, &hp)?;
    let (table, report) = trainer.train()?;
    write_atomic(&out.join(EMBEDDINGS_TEXT_FILE), write_text(&table, &lexicon).as_bytes())?;
    write_atomic(&out.join(EMBEDDINGS_BIN_FILE), &write_binary(&table, &lexicon))?;
    write_atomic(&out.join(FREQUENCIES_FILE), trainer.counts().to_tsv(&lexicon).as_bytes())?;
    write_atomic(&out.join(TRAIN_CONF_FILE), hp.to_config().as_bytes())?;
    let last = report.epoch_losses.last().copied().unwrap_or(0.0);
    Ok(format!(
        "trained {} slots x {} dims over {} windows, final epoch loss {:.4} -> {}",
        table.rows(),
        table.dim(),
        report.windows,
        last,
        out.join(EMBEDDINGS_BIN_FILE).display()
    ))
}

fn term_var(out: &Path, a: TermVarArgs) -> Result<String> {
    let model = Model::load(out)?;
    let analysis = Analysis::new(&model.table, &model.lexicon)?;
    let mode = DisMode::from(a.mode);
    let rows: Vec<TermVariation> = if let Some(term) = &a.term {
        vec![analysis.avg_term_variation(term, a.k, mode)?]
    } else if a.top.is_none() && a.bottom.is_none() {
        analysis.rank_terms_by_variation(a.k, mode, Direction::Most, usize::MAX)?
    } else {
        let mut rows = Vec::new();
        if let Some(n) = a.top {
            rows.extend(analysis.rank_terms_by_variation(a.k, mode, Direction::Most, n)?);
        }
        if let Some(n) = a.bottom {
            rows.extend(analysis.rank_terms_by_variation(a.k, mode, Direction::Least, n)?);
        }
        rows
    };
    let path = out.join(TERM_VARIATION_FILE);
    write_atomic(&path, term_variation_tsv(model.lexicon.fields(), &rows).as_bytes())?;
    let mut summary = format!("{} terms -> {}", rows.len(), path.display());
    if let Some(first) = rows.first() {
        write!(summary, "; first: {} avg_dis {:.4}", first.surface, first.average).unwrap();
    }
    Ok(summary)
}

fn neighbors(out: &Path, a: NeighborsArgs) -> Result<String> {
    let model = Model::load(out)?;
    let analysis = Analysis::new(&model.table, &model.lexicon)?;
    let set = analysis.neighbors_of(&a.term, a.field.as_deref(), a.k)?;
    let rows = analysis.neighbor_rows(&set);
    let path = out.join(NEIGHBORS_FILE);
    let tsv = neighbors_tsv(&rows);
    write_atomic(&path, tsv.as_bytes())?;
    Ok(format!("{}{} neighbors -> {}", tsv, rows.len(), path.display()))
}

fn field_var(out: &Path, a: FieldVarArgs) -> Result<String> {
    let model = Model::load(out)?;
    let counts = model.counts(out)?;
    let analysis = Analysis::new(&model.table, &model.lexicon)?.with_counts(&counts);
    let matrix = analysis.field_distance_matrix(a.k)?;
    let csv = out.join(FIELD_CSV_FILE);
    write_atomic(&csv, matrix.to_csv(a.directed).as_bytes())?;
    write_atomic(&out.join(FIELD_SVG_FILE), matrix.to_svg(a.directed).as_bytes())?;
    let m = matrix.fields.len();
    Ok(format!("{m}x{m} {} field distances -> {}", if a.directed { "directed" } else { "symmetrized" }, csv.display()))
}

fn eval_cmd(out: &Path, a: EvalArgs) -> Result<String> {
    if a.ndcg_ranks.is_empty() || a.ndcg_ranks.contains(&0) {
        return Err(Error::Invalid("--ndcg-ranks needs positive ranks".into()));
    }
    let model = Model::load(out)?;
    let annotations = load_annotations(&a.annotations, Some(&model.lexicon))?;
    let surfaces: Vec<String> = annotations.entries.keys().cloned().collect();
    let analysis = Analysis::new(&model.table, &model.lexicon)?;
    let mode = DisMode::from(a.mode);
    let (js, cosine) = model_scores(&analysis, &surfaces, a.k, mode)?;
    let mut methods = Vec::new();
    if let Some(BaselineArg::SeparateCbow) = a.baseline {
        let vocab = VocabConfig::load(out)?;
        let hp = load_trained_hyperparams(out)?;
        let corpora = ingest(&vocab)?;
        let terms: BTreeSet<String> = model.lexicon.terms().iter().cloned().collect();
        let spaces = train_separate_baseline(&corpora, &terms, vocab.min_count, &hp)?;
        methods.push((METHOD_SEPARATE_JS.to_string(), baseline_scores(&spaces, &surfaces, a.k, mode)?));
    }
    methods.push((METHOD_MODEL_COSINE.to_string(), cosine));
    methods.push((METHOD_MODEL_JS.to_string(), js));
    let report = compare_methods(&annotations, &methods, &a.ndcg_ranks)?;
    let path = out.join(EVAL_FILE);
    let tsv = report.to_tsv();
    write_atomic(&path, tsv.as_bytes())?;
    Ok(format!("{tsv}{} annotated terms -> {}", surfaces.len(), path.display()))
}

fn project(out: &Path, a: ProjectArgs) -> Result<String> {
    let model = Model::load(out)?;
    let points = match a.scope {
        ScopeArg::Terms => project_terms(&model.table, &model.lexicon)?,
    };
    let path = if a.out.is_absolute() { a.out } else { out.join(a.out) };
    write_atomic(&path, coords_tsv(&points).as_bytes())?;
    Ok(format!("{} points -> {}", points.len(), path.display()))
}

fn synth(out: &Path, a: SynthArgs) -> Result<String> {
    let spec = SynthSpec::from_toml(&read_to_string(&a.spec)?)?;
    let corpus = generate(&spec, a.seed)?;
    let dest = a.dest.unwrap_or_else(|| out.join("corpus"));
    corpus.write(&dest)?;
    Ok(format!(
        "{} fields x {} tokens, {} stable and {} divergent terms -> {}",
        corpus.fields.len(),
        spec.tokens_per_field,
        corpus.stable_terms.len(),
        corpus.divergent_terms.len(),
        dest.display()
    ))
}
