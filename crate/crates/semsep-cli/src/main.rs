//! `semsep` command line interface: fit and inspect topic models over
//! document embeddings, train static word vectors, and drive benchmark
//! matrices.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use semsep::bench::{
    parse_topic_file, render_compass_svg, render_table, run_benchmark, RunSpec, TableFormat,
};
use semsep::corpus::{
    build_vocabulary, load_corpus, tokenize, CorpusFormat, Document, Weighting,
};
use semsep::embed::{
    encode_documents_static, encode_vocabulary, load_embeddings, load_word_vectors,
    save_embeddings, EmbeddingFormat, VocabularySource,
};
use semsep::metrics::{
    diversity, nonalpha_rate, npmi_detailed, stopword_rate, wec, MetricReport, StopwordList,
};
use semsep::numerics::RngSeed;
use semsep::s3::{fit as fit_s3, load_model, save_model, FitOptions};
use semsep::wordvec::{train_sgns, SgnsConfig};

#[derive(Parser)]
#[command(
    name = "semsep",
    version,
    about = "Topic modeling over document embeddings: independent semantic axes, classical baselines, quality metrics, and a benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a topic model on document embeddings and save it
    Fit(FitArgs),
    /// Print the topics of a saved model
    Describe(DescribeArgs),
    /// Project new document embeddings onto a saved model's topics
    Transform(TransformArgs),
    /// Render a term compass along two topic axes as SVG
    Compass(CompassArgs),
    /// Score a topics file against a corpus
    Eval(EvalArgs),
    /// Run a model × topic-count benchmark matrix
    Bench(BenchArgs),
    /// Train static word vectors on a corpus
    TrainWordvec(TrainWordvecArgs),
    /// Encode documents as averaged static word vectors
    EncodeStatic(EncodeStaticArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file (JSONL with id/text) or directory of .txt files
    #[arg(long)]
    corpus: PathBuf,
    /// jsonl | txt-dir
    #[arg(long, default_value = "jsonl")]
    corpus_format: CorpusFormat,
}

impl CorpusArgs {
    fn load(&self) -> anyhow::Result<Vec<Document>> {
        Ok(load_corpus(&self.corpus, self.corpus_format)?)
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Precomputed document embeddings
    #[arg(long, required_unless_present = "word_vectors")]
    embeddings: Option<PathBuf>,
    /// Labeled term embeddings covering the vocabulary
    #[arg(long, requires = "embeddings")]
    term_embeddings: Option<PathBuf>,
    /// emb1 | csv
    #[arg(long, default_value = "emb1")]
    embeddings_format: EmbeddingFormat,
    /// Static word-vector table; encodes documents and vocabulary instead
    /// of precomputed embeddings
    #[arg(long, conflicts_with = "embeddings")]
    word_vectors: Option<PathBuf>,
    /// Number of topics to extract
    #[arg(long, default_value_t = 10)]
    topics: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop terms appearing in fewer documents than this
    #[arg(long, default_value_t = 10)]
    min_df: u32,
    /// Drop terms appearing in more than this fraction of documents
    #[arg(long, default_value_t = 1.0)]
    max_df_ratio: f64,
    /// Score terms without subtracting the training mean
    #[arg(long)]
    uncentered_terms: bool,
    /// Where to write the fitted model
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct DescribeArgs {
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
    /// Terms per pole in each topic description
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// text | csv
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    /// Embeddings of the documents to project
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long, default_value = "emb1")]
    embeddings_format: EmbeddingFormat,
    /// CSV destination; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompassArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0)]
    axis_x: usize,
    #[arg(long, default_value_t = 1)]
    axis_y: usize,
    /// How many terms (largest coordinate norm first) get text labels
    #[arg(long, default_value_t = 30)]
    max_labels: usize,
    /// SVG destination; stdout when omitted
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Topics file, one topic per line: `t: term1 term2 ...`
    #[arg(long)]
    topics: PathBuf,
    /// Word-vector table for internal embedding coherence
    #[arg(long)]
    wordvec_in: Option<PathBuf>,
    /// Word-vector table for external embedding coherence
    #[arg(long)]
    wordvec_ex: Option<PathBuf>,
    /// Sliding co-occurrence window width in tokens
    #[arg(long, default_value_t = 10)]
    npmi_window: usize,
    /// Model name to put in the report row
    #[arg(long, default_value = "eval")]
    name: String,
    /// csv | text
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct BenchArgs {
    /// key=value file with the run configuration; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    corpus_format: Option<CorpusFormat>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    term_embeddings: Option<PathBuf>,
    #[arg(long)]
    embeddings_format: Option<EmbeddingFormat>,
    #[arg(long)]
    word_vectors: Option<PathBuf>,
    #[arg(long)]
    wordvec_in: Option<PathBuf>,
    #[arg(long)]
    wordvec_ex: Option<PathBuf>,
    /// Comma-separated subset of s3,nmf,lsa,lda
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Comma-separated topic counts, e.g. 10,20,30
    #[arg(long, value_delimiter = ',')]
    topics: Option<Vec<usize>>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    min_df: Option<u32>,
    #[arg(long)]
    max_df_ratio: Option<f64>,
    /// count | tfidf
    #[arg(long)]
    weighting: Option<Weighting>,
    #[arg(long)]
    npmi_window: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Table format printed after the run: markdown | csv
    #[arg(long, default_value = "markdown")]
    format: String,
}

#[derive(Args)]
struct TrainWordvecArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = 100)]
    dims: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    min_count: u32,
    #[arg(long, default_value_t = 1e-3)]
    subsample: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; more than 1 trades bit-reproducibility for speed
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Destination for the word2vec-style text table
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct EncodeStaticArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Word-vector table used for averaging
    #[arg(long)]
    word_vectors: PathBuf,
    /// Destination embedding file
    #[arg(long, short)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Single diagnostic line; chained causes joined inline, skipping
            // causes whose text the outer message already embeds.
            let mut parts: Vec<String> = Vec::new();
            for cause in e.chain() {
                let msg = cause.to_string();
                if !parts.iter().any(|prev| prev.contains(&msg)) {
                    parts.push(msg);
                }
            }
            eprintln!("error: {}", parts.join(": "));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Fit(args) => cmd_fit(args),
        Command::Describe(args) => cmd_describe(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Compass(args) => cmd_compass(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::TrainWordvec(args) => cmd_train_wordvec(args),
        Command::EncodeStatic(args) => cmd_encode_static(args),
    }
}

fn write_or_print(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> anyhow::Result<()> {
    let docs = args.corpus.load()?;
    let vocab = build_vocabulary(&docs, args.min_df, args.max_df_ratio)?;

    let (x, v) = match (&args.embeddings, &args.word_vectors) {
        (Some(doc_path), None) => {
            let x = load_embeddings(doc_path, args.embeddings_format)?;
            let term_path = args
                .term_embeddings
                .as_ref()
                .context("--term-embeddings is required with --embeddings")?;
            let table = load_embeddings(term_path, args.embeddings_format)?;
            let enc = encode_vocabulary(&vocab, VocabularySource::Precomputed(&table))?;
            (x, enc.matrix)
        }
        (None, Some(vec_path)) => {
            let table = load_word_vectors(vec_path)?;
            let x = encode_documents_static(&docs, &table, tokenize)?;
            let enc = encode_vocabulary(&vocab, VocabularySource::StaticTable(&table))?;
            if !enc.missing_terms.is_empty() {
                eprintln!(
                    "note: {} vocabulary terms have no vector and were encoded as zero",
                    enc.missing_terms.len()
                );
            }
            (x, enc.matrix)
        }
        _ => bail!("give exactly one of --embeddings or --word-vectors"),
    };

    let opts = FitOptions { center_terms: !args.uncentered_terms, ..FitOptions::default() };
    let model = fit_s3(&x, &v, &vocab, args.topics, RngSeed(args.seed), &opts)?;
    if !model.converged {
        eprintln!("note: component estimation stopped at the iteration cap without converging");
    }
    save_model(&model, &args.output)?;
    println!(
        "fitted {} topics on {} documents in {:.2}s -> {}",
        model.n_topics,
        docs.len(),
        model.fit_runtime,
        args.output.display()
    );
    Ok(())
}

fn cmd_describe(args: DescribeArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let top_k = args.top_k.min(model.vocab.len()).max(1);
    let descriptions = model.describe_topics(top_k)?;
    match args.format.as_str() {
        "text" => {
            for d in &descriptions {
                let pos: Vec<&str> = d.positive.iter().map(|(t, _)| t.as_str()).collect();
                let neg: Vec<&str> = d.negative.iter().map(|(t, _)| t.as_str()).collect();
                println!("{}: {}", d.topic_id, pos.join(" "));
                println!("{} (neg): {}", d.topic_id, neg.join(" "));
            }
        }
        "csv" => {
            println!("topic,pole,rank,term,score");
            for d in &descriptions {
                for (rank, (term, score)) in d.positive.iter().enumerate() {
                    println!("{},positive,{},{},{}", d.topic_id, rank, term, score);
                }
                for (rank, (term, score)) in d.negative.iter().enumerate() {
                    println!("{},negative,{},{},{}", d.topic_id, rank, term, score);
                }
            }
        }
        other => bail!("unknown describe format {other:?} (expected text or csv)"),
    }
    Ok(())
}

fn cmd_transform(args: TransformArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let x = load_embeddings(&args.embeddings, args.embeddings_format)?;
    let scores = model.transform(&x)?;
    let mut out = String::new();
    let header: Vec<String> = (0..scores.cols()).map(|t| format!("topic_{t}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..scores.rows() {
        let row: Vec<String> = (0..scores.cols()).map(|j| scores[(i, j)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_or_print(args.output.as_deref(), &out)
}

fn cmd_compass(args: CompassArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let svg = render_compass_svg(&model, args.axis_x, args.axis_y, args.max_labels)?;
    write_or_print(args.output.as_deref(), &svg)
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let docs = args.corpus.load()?;
    let text = std::fs::read_to_string(&args.topics)
        .with_context(|| format!("reading {}", args.topics.display()))?;
    let topics = parse_topic_file(&text)?;

    let wec_for = |path: &Option<PathBuf>| -> anyhow::Result<Option<f64>> {
        match path {
            Some(p) => {
                let table = load_word_vectors(p)?;
                Ok(Some(wec(&topics, &table)?))
            }
            None => Ok(None),
        }
    };
    let npmi_detail = npmi_detailed(&topics, &docs, args.npmi_window)?;
    if !npmi_detail.absent_terms.is_empty() {
        eprintln!(
            "note: {} topic terms never occur in the corpus",
            npmi_detail.absent_terms.len()
        );
    }
    let report = MetricReport {
        model_name: args.name.clone(),
        encoder_tag: "file".into(),
        n_topics: topics.len(),
        diversity: diversity(&topics)?,
        wec_in: wec_for(&args.wordvec_in)?,
        wec_ex: wec_for(&args.wordvec_ex)?,
        npmi: Some(npmi_detail.value),
        stopword_rate: stopword_rate(&topics, &StopwordList::bundled())?,
        nonalpha_rate: nonalpha_rate(&topics)?,
        runtime_seconds: 0.0,
        seed: 0,
    };
    match args.format.as_str() {
        "csv" => {
            println!("{}", MetricReport::csv_header());
            println!("{}", report.csv_row());
        }
        "text" => {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
            println!("topics:         {}", report.n_topics);
            println!("diversity:      {:.4}", report.diversity);
            println!("wec_in:         {}", opt(report.wec_in));
            println!("wec_ex:         {}", opt(report.wec_ex));
            println!("npmi:           {}", opt(report.npmi));
            println!("stopword_rate:  {:.4}", report.stopword_rate);
            println!("nonalpha_rate:  {:.4}", report.nonalpha_rate);
        }
        other => bail!("unknown eval format {other:?} (expected text or csv)"),
    }
    Ok(())
}

/// Applies `key = value` lines (# comments allowed) onto a run spec.
fn apply_config_file(spec: &mut RunSpec, path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key=value", path.display(), idx + 1))?;
        let key = key.trim();
        let value = value.trim();
        let fail = |what: &str| {
            anyhow::anyhow!("{}:{}: bad {what} value {value:?}", path.display(), idx + 1)
        };
        match key {
            "corpus" => spec.corpus = value.into(),
            "corpus_format" => spec.corpus_format = value.parse().map_err(|_| fail("corpus_format"))?,
            "embeddings" => spec.embeddings = Some(value.into()),
            "term_embeddings" => spec.term_embeddings = Some(value.into()),
            "embeddings_format" => {
                spec.embeddings_format = value.parse().map_err(|_| fail("embeddings_format"))?
            }
            "word_vectors" => spec.word_vectors = Some(value.into()),
            "wordvec_in" => spec.wordvec_in = Some(value.into()),
            "wordvec_ex" => spec.wordvec_ex = Some(value.into()),
            "models" => {
                spec.models = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            "topic_counts" | "topics" => {
                spec.topic_counts = value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| fail("topic list"))?
            }
            "top_k" => spec.top_k = value.parse().map_err(|_| fail("top_k"))?,
            "seed" => spec.seed = value.parse().map_err(|_| fail("seed"))?,
            "min_df" => spec.min_df = value.parse().map_err(|_| fail("min_df"))?,
            "max_df_ratio" => spec.max_df_ratio = value.parse().map_err(|_| fail("max_df_ratio"))?,
            "weighting" => spec.weighting = value.parse().map_err(|_| fail("weighting"))?,
            "npmi_window" => spec.npmi_window = value.parse().map_err(|_| fail("npmi_window"))?,
            "out_dir" => spec.out_dir = value.into(),
            other => bail!("{}:{}: unknown key {other:?}", path.display(), idx + 1),
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let table_format = match args.format.as_str() {
        "markdown" | "md" => TableFormat::Markdown,
        "csv" => TableFormat::Csv,
        other => bail!("unknown table format {other:?} (expected markdown or csv)"),
    };

    let mut spec = RunSpec::new("", "bench-out");
    if let Some(config) = &args.config {
        apply_config_file(&mut spec, config)?;
    }
    if let Some(v) = args.corpus {
        spec.corpus = v;
    }
    if let Some(v) = args.corpus_format {
        spec.corpus_format = v;
    }
    if let Some(v) = args.embeddings {
        spec.embeddings = Some(v);
    }
    if let Some(v) = args.term_embeddings {
        spec.term_embeddings = Some(v);
    }
    if let Some(v) = args.embeddings_format {
        spec.embeddings_format = v;
    }
    if let Some(v) = args.word_vectors {
        spec.word_vectors = Some(v);
    }
    if let Some(v) = args.wordvec_in {
        spec.wordvec_in = Some(v);
    }
    if let Some(v) = args.wordvec_ex {
        spec.wordvec_ex = Some(v);
    }
    if let Some(v) = args.models {
        spec.models = v;
    }
    if let Some(v) = args.topics {
        spec.topic_counts = v;
    }
    if let Some(v) = args.top_k {
        spec.top_k = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.min_df {
        spec.min_df = v;
    }
    if let Some(v) = args.max_df_ratio {
        spec.max_df_ratio = v;
    }
    if let Some(v) = args.weighting {
        spec.weighting = v;
    }
    if let Some(v) = args.npmi_window {
        spec.npmi_window = v;
    }
    if let Some(v) = args.out_dir {
        spec.out_dir = v;
    }
    if spec.corpus.as_os_str().is_empty() {
        bail!("no corpus given (flag --corpus or config key corpus)");
    }

    let record = run_benchmark(&spec)?;
    for warning in &record.warnings {
        eprintln!("note: {warning}");
    }
    for failure in &record.failures {
        eprintln!(
            "failed cell: {} k={}: {}",
            failure.model, failure.n_topics, failure.message
        );
    }
    if !record.reports.is_empty() {
        print!("{}", render_table(&record, table_format)?);
    }
    eprintln!(
        "wrote {} reports ({} failed cells) to {}",
        record.reports.len(),
        record.failures.len(),
        spec.out_dir.display()
    );
    Ok(())
}

fn cmd_train_wordvec(args: TrainWordvecArgs) -> anyhow::Result<()> {
    let docs = args.corpus.load()?;
    let cfg = SgnsConfig {
        dims: args.dims,
        window: args.window,
        negatives: args.negatives,
        epochs: args.epochs,
        min_count: args.min_count,
        subsample_threshold: args.subsample,
        seed: RngSeed(args.seed),
        threads: args.threads,
        ..SgnsConfig::default()
    };
    let outcome = train_sgns(&docs, &cfg)?;
    outcome.table.save(&args.output)?;
    let losses: Vec<String> =
        outcome.epoch_loss.iter().map(|l| format!("{l:.4}")).collect();
    println!(
        "trained {} vectors ({} dims) -> {} | epoch loss: {}",
        outcome.table.len(),
        args.dims,
        args.output.display(),
        losses.join(" ")
    );
    Ok(())
}

fn cmd_encode_static(args: EncodeStaticArgs) -> anyhow::Result<()> {
    let docs = args.corpus.load()?;
    let table = load_word_vectors(&args.word_vectors)?;
    let x = encode_documents_static(&docs, &table, tokenize)?;
    save_embeddings(&x, &args.output)?;
    println!(
        "encoded {} documents at {} dims -> {}",
        x.rows(),
        x.dims(),
        args.output.display()
    );
    Ok(())
}
