//! Benchmark orchestration: run the model × topic-count matrix over one
//! corpus, collect metric reports with per-cell failure isolation, persist
//! everything reproducibly, and render tables and compass plots.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{fit_lsa, fit_nmf};
use crate::corpus::{bow_counts, build_vocabulary, load_corpus, CorpusFormat, Vocabulary, Weighting};
use crate::embed::{
    encode_documents_static, encode_vocabulary, load_embeddings, load_word_vectors,
    EmbeddingFormat, EmbeddingMatrix, VocabularySource, WordVectorTable,
};
use crate::error::{Error, Result};
use crate::metrics::{
    diversity, nonalpha_rate, npmi_detailed, stopword_rate, wec, MetricReport, StopwordList,
};
use crate::numerics::RngSeed;
use crate::s3::{fit as fit_s3, FitOptions, S3Model};
use crate::wordvec::{train_sgns, SgnsConfig};

pub const KNOWN_MODELS: [&str; 4] = ["s3", "nmf", "lsa", "lda"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSpec {
    pub corpus: PathBuf,
    pub corpus_format: CorpusFormat,
    /// Precomputed document embeddings (EMB1/CSV); mutually exclusive with
    /// `word_vectors`.
    pub embeddings: Option<PathBuf>,
    /// Precomputed labeled term embeddings; required alongside `embeddings`
    /// when the s3 model is in the matrix.
    pub term_embeddings: Option<PathBuf>,
    pub embeddings_format: EmbeddingFormat,
    /// Static word-vector table used to encode documents and vocabulary.
    pub word_vectors: Option<PathBuf>,
    /// Table for internal coherence; when absent one is trained on the
    /// corpus with the run seed.
    pub wordvec_in: Option<PathBuf>,
    /// External table for cross-corpus coherence; skipped when absent.
    pub wordvec_ex: Option<PathBuf>,
    pub models: Vec<String>,
    pub topic_counts: Vec<usize>,
    pub top_k: usize,
    pub seed: u64,
    pub min_df: u32,
    pub max_df_ratio: f64,
    pub weighting: Weighting,
    pub npmi_window: usize,
    pub out_dir: PathBuf,
}

impl RunSpec {
    pub fn new(corpus: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunSpec {
            corpus: corpus.into(),
            corpus_format: CorpusFormat::Jsonl,
            embeddings: None,
            term_embeddings: None,
            embeddings_format: EmbeddingFormat::Emb1Binary,
            word_vectors: None,
            wordvec_in: None,
            wordvec_ex: None,
            models: vec!["s3".into(), "nmf".into(), "lsa".into()],
            topic_counts: vec![10, 20, 30, 40, 50],
            top_k: 10,
            seed: 0,
            min_df: 10,
            max_df_ratio: 1.0,
            weighting: Weighting::Tfidf,
            npmi_window: 10,
            out_dir: out_dir.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidArgument("no models requested".into()));
        }
        for m in &self.models {
            if !KNOWN_MODELS.contains(&m.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "unknown model {m:?} (known: {})",
                    KNOWN_MODELS.join(", ")
                )));
            }
        }
        if self.topic_counts.is_empty() || self.topic_counts.iter().any(|&k| k < 1) {
            return Err(Error::InvalidArgument("topic_counts must be nonempty, all >= 1".into()));
        }
        if self.top_k < 1 {
            return Err(Error::InvalidArgument("top_k must be >= 1".into()));
        }
        if self.embeddings.is_some() && self.word_vectors.is_some() {
            return Err(Error::InvalidArgument(
                "give either precomputed embeddings or a static word-vector table, not both".into(),
            ));
        }
        if self.models.iter().any(|m| m == "s3") && self.embeddings.is_none() && self.word_vectors.is_none() {
            return Err(Error::InvalidArgument(
                "the s3 model needs document embeddings or a static word-vector table".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellFailure {
    pub model: String,
    pub n_topics: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct TopicListing {
    pub model: String,
    pub n_topics: usize,
    /// Positive top-k terms per topic.
    pub topics: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub reports: Vec<MetricReport>,
    pub topics: Vec<TopicListing>,
    pub failures: Vec<CellFailure>,
    pub tool_version: String,
    pub started_at: u64,
    pub finished_at: u64,
    /// Non-fatal notes (missing vocabulary vectors, absent coherence terms).
    pub warnings: Vec<String>,
}

fn epoch_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

struct PreparedInputs {
    docs: Vec<crate::corpus::Document>,
    vocab: Vocabulary,
    bow: crate::corpus::BowMatrix,
    doc_embeddings: Option<EmbeddingMatrix>,
    term_embeddings: Option<EmbeddingMatrix>,
    encoder_tag: String,
    wec_in_table: Option<WordVectorTable>,
    wec_ex_table: Option<WordVectorTable>,
    warnings: Vec<String>,
}

fn prepare(spec: &RunSpec) -> Result<PreparedInputs> {
    let docs = load_corpus(&spec.corpus, spec.corpus_format)?;
    let vocab = build_vocabulary(&docs, spec.min_df, spec.max_df_ratio)?;
    let bow = bow_counts(&docs, &vocab, spec.weighting);
    let mut warnings = Vec::new();

    let needs_s3 = spec.models.iter().any(|m| m == "s3");
    let (doc_embeddings, term_embeddings, encoder_tag) = if let Some(path) = &spec.embeddings {
        let x = load_embeddings(path, spec.embeddings_format)?;
        if x.rows() != docs.len() {
            return Err(Error::DimensionMismatch {
                context: "document embedding rows vs corpus".into(),
                expected: docs.len(),
                got: x.rows(),
            });
        }
        let v = match &spec.term_embeddings {
            Some(tp) => {
                let file = load_embeddings(tp, spec.embeddings_format)?;
                Some(encode_vocabulary(&vocab, VocabularySource::Precomputed(&file))?.matrix)
            }
            None if needs_s3 => {
                return Err(Error::InvalidArgument(
                    "precomputed document embeddings need term embeddings for the s3 model".into(),
                ))
            }
            None => None,
        };
        (Some(x), v, "precomputed".to_string())
    } else if let Some(path) = &spec.word_vectors {
        let table = load_word_vectors(path)?;
        let x = encode_documents_static(&docs, &table, crate::corpus::tokenize)?;
        let enc = encode_vocabulary(&vocab, VocabularySource::StaticTable(&table))?;
        if !enc.missing_terms.is_empty() {
            warnings.push(format!(
                "{} vocabulary terms have no static vector and were encoded as zero",
                enc.missing_terms.len()
            ));
        }
        (Some(x), Some(enc.matrix), "static-avg".to_string())
    } else {
        (None, None, "bow-only".to_string())
    };

    let wec_in_table = match &spec.wordvec_in {
        Some(path) => Some(load_word_vectors(path)?),
        None => {
            let cfg = SgnsConfig { seed: RngSeed(spec.seed), ..SgnsConfig::default() };
            match train_sgns(&docs, &cfg) {
                Ok(out) => Some(out.table),
                Err(e) => {
                    warnings.push(format!("internal coherence vectors unavailable: {e}"));
                    None
                }
            }
        }
    };
    let wec_ex_table = match &spec.wordvec_ex {
        Some(path) => Some(load_word_vectors(path)?),
        None => None,
    };

    Ok(PreparedInputs {
        docs,
        vocab,
        bow,
        doc_embeddings,
        term_embeddings,
        encoder_tag,
        wec_in_table,
        wec_ex_table,
        warnings,
    })
}

/// Fits one (model, n_topics) cell and returns the positive topic lists
/// plus the fit-only wall-clock time.
fn run_cell(
    model: &str,
    k: usize,
    inputs: &PreparedInputs,
    spec: &RunSpec,
) -> Result<(Vec<Vec<String>>, f64, Option<S3Model>)> {
    // Small vocabularies cap the description length.
    let top_k = spec.top_k.min(inputs.vocab.len()).max(1);
    match model {
        "s3" => {
            let x = inputs
                .doc_embeddings
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("document embeddings missing".into()))?;
            let v = inputs
                .term_embeddings
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("term embeddings missing".into()))?;
            let model =
                fit_s3(x, v, &inputs.vocab, k, RngSeed(spec.seed), &FitOptions::default())?;
            let topics = model
                .describe_topics(top_k)?
                .into_iter()
                .map(|d| d.positive.into_iter().map(|(t, _)| t).collect())
                .collect();
            Ok((topics, model.fit_runtime, Some(model)))
        }
        "nmf" => {
            let start = Instant::now();
            let model = fit_nmf(&inputs.bow, k, RngSeed(spec.seed), 200, 1e-4)?;
            let runtime = start.elapsed().as_secs_f64();
            let topics = model
                .describe_topics(&inputs.vocab, top_k)?
                .into_iter()
                .map(|d| d.positive.into_iter().map(|(t, _)| t).collect())
                .collect();
            Ok((topics, runtime, None))
        }
        "lsa" => {
            let start = Instant::now();
            let model = fit_lsa(&inputs.bow, k)?;
            let runtime = start.elapsed().as_secs_f64();
            let topics = model
                .describe_topics(&inputs.vocab, top_k)?
                .into_iter()
                .map(|d| d.positive.into_iter().map(|(t, _)| t).collect())
                .collect();
            Ok((topics, runtime, None))
        }
        other => Err(Error::NotImplemented(format!("model {other}"))),
    }
}

pub fn run_benchmark(spec: &RunSpec) -> Result<RunRecord> {
    spec.validate()?;
    let started_at = epoch_seconds();
    let inputs = prepare(spec)?;
    let stopwords = StopwordList::bundled();

    let mut reports = Vec::new();
    let mut listings = Vec::new();
    let mut failures = Vec::new();
    let mut warnings = inputs.warnings.clone();
    let mut compasses: Vec<(usize, String)> = Vec::new();

    for model_name in &spec.models {
        for &k in &spec.topic_counts {
            let (topics, runtime, s3_model) = match run_cell(model_name, k, &inputs, spec) {
                Ok(cell) => cell,
                Err(e) => {
                    failures.push(CellFailure {
                        model: model_name.clone(),
                        n_topics: k,
                        message: e.to_string(),
                    });
                    continue;
                }
            };

            let div = diversity(&topics)?;
            let wec_in = match &inputs.wec_in_table {
                Some(table) => wec(&topics, table).ok(),
                None => None,
            };
            let wec_ex = match &inputs.wec_ex_table {
                Some(table) => wec(&topics, table).ok(),
                None => None,
            };
            let npmi_value = match npmi_detailed(&topics, &inputs.docs, spec.npmi_window) {
                Ok(detail) => {
                    if !detail.absent_terms.is_empty() {
                        warnings.push(format!(
                            "{model_name} k={k}: {} description terms never occur in the corpus",
                            detail.absent_terms.len()
                        ));
                    }
                    Some(detail.value)
                }
                Err(_) => None,
            };

            reports.push(MetricReport {
                model_name: model_name.clone(),
                encoder_tag: inputs.encoder_tag.clone(),
                n_topics: k,
                diversity: div,
                wec_in,
                wec_ex,
                npmi: npmi_value,
                stopword_rate: stopword_rate(&topics, &stopwords)?,
                nonalpha_rate: nonalpha_rate(&topics)?,
                runtime_seconds: runtime,
                seed: spec.seed,
            });
            listings.push(TopicListing { model: model_name.clone(), n_topics: k, topics });

            if let Some(m) = s3_model {
                if k >= 2 {
                    compasses.push((k, render_compass_svg(&m, 0, 1, 30)?));
                }
            }
        }
    }

    let record = RunRecord {
        spec: spec.clone(),
        reports,
        topics: listings,
        failures,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: epoch_seconds(),
        warnings,
    };
    write_record(&record, &compasses)?;
    Ok(record)
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    spec: RunSpec,
    tool_version: String,
    started_at: u64,
    finished_at: u64,
    failures: Vec<CellFailure>,
    warnings: Vec<String>,
}

fn write_record(record: &RunRecord, compasses: &[(usize, String)]) -> Result<()> {
    let dir = &record.spec.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let spec_file = SpecFile {
        spec: record.spec.clone(),
        tool_version: record.tool_version.clone(),
        started_at: record.started_at,
        finished_at: record.finished_at,
        failures: record.failures.clone(),
        warnings: record.warnings.clone(),
    };
    let spec_json = serde_json::to_string_pretty(&spec_file)
        .map_err(|e| Error::InvalidArgument(format!("spec serialization failed: {e}")))?;
    std::fs::write(dir.join("spec.json"), spec_json + "\n")
        .map_err(|e| Error::io(dir.join("spec.json"), e))?;

    let mut csv = MetricReport::csv_header();
    csv.push('\n');
    for report in &record.reports {
        csv.push_str(&report.csv_row());
        csv.push('\n');
    }
    std::fs::write(dir.join("reports.csv"), csv).map_err(|e| Error::io(dir.join("reports.csv"), e))?;

    let topics_dir = dir.join("topics");
    std::fs::create_dir_all(&topics_dir).map_err(|e| Error::io(&topics_dir, e))?;
    for listing in &record.topics {
        let mut text = String::new();
        for (t, terms) in listing.topics.iter().enumerate() {
            let _ = writeln!(text, "{t}: {}", terms.join(" "));
        }
        let path = topics_dir.join(format!("{}_{}.txt", listing.model, listing.n_topics));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }

    if !compasses.is_empty() {
        let compass_dir = dir.join("compass");
        std::fs::create_dir_all(&compass_dir).map_err(|e| Error::io(&compass_dir, e))?;
        for (k, svg) in compasses {
            let path = compass_dir.join(format!("s3_{k}.svg"));
            std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Per-model mean and 2·(population SD) for every metric column, grouped
/// in first-appearance order. Optional metrics aggregate over the rows
/// where they are present.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelAggregate {
    pub model_name: String,
    pub diversity: (f64, f64),
    pub wec_in: Option<(f64, f64)>,
    pub wec_ex: Option<(f64, f64)>,
    pub npmi: Option<(f64, f64)>,
    pub stopword_rate: (f64, f64),
    pub nonalpha_rate: (f64, f64),
    pub runtime_seconds: (f64, f64),
}

fn mean_two_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, 2.0 * var.sqrt())
}

pub fn aggregate_metrics(reports: &[MetricReport]) -> Vec<ModelAggregate> {
    let mut order: Vec<&str> = Vec::new();
    for r in reports {
        if !order.contains(&r.model_name.as_str()) {
            order.push(&r.model_name);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let rows: Vec<&MetricReport> =
                reports.iter().filter(|r| r.model_name == name).collect();
            let col = |f: &dyn Fn(&MetricReport) -> f64| -> (f64, f64) {
                mean_two_sd(&rows.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            let opt_col = |f: &dyn Fn(&MetricReport) -> Option<f64>| -> Option<(f64, f64)> {
                let values: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
                if values.is_empty() {
                    None
                } else {
                    Some(mean_two_sd(&values))
                }
            };
            ModelAggregate {
                model_name: name.to_string(),
                diversity: col(&|r| r.diversity),
                wec_in: opt_col(&|r| r.wec_in),
                wec_ex: opt_col(&|r| r.wec_ex),
                npmi: opt_col(&|r| r.npmi),
                stopword_rate: col(&|r| r.stopword_rate),
                nonalpha_rate: col(&|r| r.nonalpha_rate),
                runtime_seconds: col(&|r| r.runtime_seconds),
            }
        })
        .collect()
}

pub fn format_aggregate(pair: (f64, f64)) -> String {
    format!("{:.2} ± {:.2}", pair.0, pair.1)
}

const TABLE_COLUMNS: [&str; 9] = [
    "model",
    "n_topics",
    "diversity",
    "wec_in",
    "wec_ex",
    "npmi",
    "stopword_rate",
    "nonalpha_rate",
    "runtime_s",
];

/// Renders the per-cell rows (metrics at two decimals) followed by one
/// `mean ± 2·SD` aggregate row per model.
pub fn render_table(record: &RunRecord, format: TableFormat) -> Result<String> {
    if record.reports.is_empty() {
        return Err(Error::InvalidArgument("no reports to render".into()));
    }
    let two = |v: f64| format!("{v:.2}");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();

    let mut rows: Vec<Vec<String>> = Vec::new();
    for r in &record.reports {
        rows.push(vec![
            r.model_name.clone(),
            r.n_topics.to_string(),
            two(r.diversity),
            opt(r.wec_in),
            opt(r.wec_ex),
            opt(r.npmi),
            two(r.stopword_rate),
            two(r.nonalpha_rate),
            two(r.runtime_seconds),
        ]);
    }
    for agg in aggregate_metrics(&record.reports) {
        let opt_pair = |p: Option<(f64, f64)>| p.map(format_aggregate).unwrap_or_default();
        rows.push(vec![
            format!("{} (all)", agg.model_name),
            "—".to_string(),
            format_aggregate(agg.diversity),
            opt_pair(agg.wec_in),
            opt_pair(agg.wec_ex),
            opt_pair(agg.npmi),
            format_aggregate(agg.stopword_rate),
            format_aggregate(agg.nonalpha_rate),
            format_aggregate(agg.runtime_seconds),
        ]);
    }

    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&TABLE_COLUMNS.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", TABLE_COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}|", TABLE_COLUMNS.map(|_| " --- ").join("|"));
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
    }
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter of every vocabulary term along two topic axes. The
/// `max_labels` terms with the largest coordinate norm get text labels;
/// both axes are annotated with their topic's top-3 positive terms.
pub fn render_compass_svg(model: &S3Model, axis_x: usize, axis_y: usize, max_labels: usize) -> Result<String> {
    let view = model.compass(axis_x, axis_y, None)?;
    let descriptions = model.describe_topics(3.min(model.vocab.len()).max(1))?;
    let annotate = |t: usize| -> String {
        descriptions[t]
            .positive
            .iter()
            .map(|(term, _)| term.as_str())
            .collect::<Vec<_>>()
            .join(" · ")
    };

    let (width, height, margin) = (800.0, 600.0, 70.0);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &view.points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    if !(xmax > xmin) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if !(ymax > ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    let pad_x = 0.05 * (xmax - xmin);
    let pad_y = 0.05 * (ymax - ymin);
    xmin -= pad_x;
    xmax += pad_x;
    ymin -= pad_y;
    ymax += pad_y;
    let sx = |x: f64| margin + (x - xmin) / (xmax - xmin) * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - ymin) / (ymax - ymin) * (height - 2.0 * margin);

    let mut labeled: Vec<&crate::s3::CompassPoint> = view.points.iter().collect();
    labeled.sort_by(|a, b| {
        let na = a.x * a.x + a.y * a.y;
        let nb = b.x * b.x + b.y * b.y;
        nb.partial_cmp(&na).expect("finite coordinates").then_with(|| a.term.cmp(&b.term))
    });
    let labeled: std::collections::HashSet<&str> =
        labeled.iter().take(max_labels).map(|p| p.term.as_str()).collect();

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");

    // Zero lines when the origin is inside the view.
    if xmin < 0.0 && xmax > 0.0 {
        let _ = writeln!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{1}\" x2=\"{0:.2}\" y2=\"{2}\" stroke=\"#cccccc\"/>",
            sx(0.0),
            margin,
            height - margin
        );
    }
    if ymin < 0.0 && ymax > 0.0 {
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1:.2}\" x2=\"{2}\" y2=\"{1:.2}\" stroke=\"#cccccc\"/>",
            margin,
            sy(0.0),
            width - margin
        );
    }

    for p in &view.points {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#4477aa\" fill-opacity=\"0.7\"/>",
            sx(p.x),
            sy(p.y)
        );
    }
    for p in &view.points {
        if labeled.contains(p.term.as_str()) {
            let _ = writeln!(
                svg,
                "<text class=\"term-label\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#222222\">{}</text>",
                sx(p.x) + 4.0,
                sy(p.y) - 3.0,
                xml_escape(&p.term)
            );
        }
    }

    let _ = writeln!(
        svg,
        "<text class=\"axis-label\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#555555\" text-anchor=\"middle\">axis {}: {}</text>",
        width / 2.0,
        height - margin / 3.0,
        axis_x,
        xml_escape(&annotate(axis_x))
    );
    let _ = writeln!(
        svg,
        "<text class=\"axis-label\" x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#555555\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">axis {}: {}</text>",
        margin / 3.0,
        height / 2.0,
        margin / 3.0,
        height / 2.0,
        axis_y,
        xml_escape(&annotate(axis_y))
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Parses a topics file (`t: term1 term2 ...` per line) back into topic
/// term lists.
pub fn parse_topic_file(text: &str) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (_, terms) = line.split_once(':').ok_or_else(|| Error::Parse {
            path: "topics".into(),
            line: idx + 1,
            msg: "expected `index: term term ...`".into(),
        })?;
        out.push(terms.split_whitespace().map(str::to_string).collect());
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("topics file holds no topics".into()));
    }
    Ok(out)
}

/// Parses a reports CSV produced by this tool back into records; the
/// rendered tables are a pure function of this file's contents.
pub fn parse_reports_csv(text: &str) -> Result<Vec<MetricReport>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty reports file".into()))?;
    if header != MetricReport::csv_header() {
        return Err(Error::InvalidArgument(format!("unexpected reports header: {header}")));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Parse {
                path: "reports.csv".into(),
                line: idx + 2,
                msg: format!("expected 11 fields, got {}", fields.len()),
            });
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                path: "reports.csv".into(),
                line: idx + 2,
                msg: format!("bad {what}: {s:?}"),
            })
        };
        let parse_opt = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f64(s, what).map(Some)
            }
        };
        out.push(MetricReport {
            model_name: fields[0].to_string(),
            encoder_tag: fields[1].to_string(),
            n_topics: fields[2].parse().map_err(|_| Error::Parse {
                path: "reports.csv".into(),
                line: idx + 2,
                msg: format!("bad topic count: {:?}", fields[2]),
            })?,
            diversity: parse_f64(fields[3], "diversity")?,
            wec_in: parse_opt(fields[4], "wec_in")?,
            wec_ex: parse_opt(fields[5], "wec_ex")?,
            npmi: parse_opt(fields[6], "npmi")?,
            stopword_rate: parse_f64(fields[7], "stopword_rate")?,
            nonalpha_rate: parse_f64(fields[8], "nonalpha_rate")?,
            runtime_seconds: parse_f64(fields[9], "runtime_seconds")?,
            seed: fields[10].parse().map_err(|_| Error::Parse {
                path: "reports.csv".into(),
                line: idx + 2,
                msg: format!("bad seed: {:?}", fields[10]),
            })?,
        });
    }
    Ok(out)
}
