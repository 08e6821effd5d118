//! The semantic signal separation model: fit on document embeddings,
//! score vocabulary terms on each recovered axis, transform new documents,
//! and expose two-axis compass views. Includes a versioned binary model
//! file with a JSON metadata header and checksummed float sections.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::embed::{write_atomic, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::{fastica, IcaOptions, RngSeed, Whitener};

const MODEL_MAGIC: &[u8; 4] = b"S3M1";
const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct FitOptions {
    /// Subtract the document-embedding training mean from term embeddings
    /// before scoring them. The unmixing map was estimated on centered
    /// data, so this is the default; the raw product is available for
    /// comparison.
    pub center_terms: bool,
    pub ica: IcaOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { center_terms: true, ica: IcaOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct S3Model {
    pub n_topics: usize,
    pub whitener: Whitener<f64>,
    /// d×k estimated mixing matrix.
    pub mixing: Matrix<f64>,
    /// k×d unmixing matrix; pseudo-inverse of `mixing`.
    pub unmixing: Matrix<f64>,
    /// n×k document-topic importances from the training corpus.
    pub doc_topic: Matrix<f64>,
    /// |vocab|×k term-topic importances.
    pub term_topic: Matrix<f64>,
    pub vocab: Vocabulary,
    pub seed: RngSeed,
    pub center_terms: bool,
    pub converged: bool,
    pub n_iter: usize,
    pub fit_runtime: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopicDescription {
    pub topic_id: usize,
    /// Highest-scoring terms, descending.
    pub positive: Vec<(String, f64)>,
    /// Lowest-scoring terms, ascending.
    pub negative: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompassPoint {
    pub term: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompassView {
    pub axis_x: usize,
    pub axis_y: usize,
    /// True when both axes are the same topic; the view is then the y=x line.
    pub degenerate_axes: bool,
    pub points: Vec<CompassPoint>,
}

pub fn fit(
    x: &EmbeddingMatrix,
    v: &EmbeddingMatrix,
    vocab: &Vocabulary,
    n_topics: usize,
    seed: RngSeed,
    opts: &FitOptions,
) -> Result<S3Model> {
    if v.rows() != vocab.len() {
        return Err(Error::DimensionMismatch {
            context: "term embedding rows vs vocabulary".into(),
            expected: vocab.len(),
            got: v.rows(),
        });
    }
    if x.dims() != v.dims() {
        return Err(Error::DimensionMismatch {
            context: "term embedding dims vs document embedding dims".into(),
            expected: x.dims(),
            got: v.dims(),
        });
    }
    let start = Instant::now();
    let xw = x.to_working();
    let ica = fastica(&xw, n_topics, seed, &opts.ica)?;

    let mut vw = v.to_working();
    if opts.center_terms {
        vw = vw.center_rows(&ica.whitener.mean);
    }
    let term_topic = vw.mul_transpose(&ica.unmixing);

    Ok(S3Model {
        n_topics,
        whitener: ica.whitener,
        mixing: ica.mixing,
        unmixing: ica.unmixing,
        doc_topic: ica.sources,
        term_topic,
        vocab: vocab.clone(),
        seed,
        center_terms: opts.center_terms,
        converged: ica.converged,
        n_iter: ica.n_iter,
        fit_runtime: start.elapsed().as_secs_f64(),
    })
}

impl S3Model {
    pub fn input_dims(&self) -> usize {
        self.whitener.input_dims()
    }

    /// Projects new document embeddings onto the topic axes:
    /// each row becomes `unmixing · (x − mean)`.
    pub fn transform(&self, x_new: &EmbeddingMatrix) -> Result<Matrix<f64>> {
        if x_new.dims() != self.input_dims() {
            return Err(Error::DimensionMismatch {
                context: "transform input dims".into(),
                expected: self.input_dims(),
                got: x_new.dims(),
            });
        }
        let centered = x_new.to_working().center_rows(&self.whitener.mean);
        Ok(centered.mul_transpose(&self.unmixing))
    }

    /// Ranks terms on every axis: `positive` takes the `top_k` highest
    /// scores descending, `negative` the `top_k` lowest ascending. Ties
    /// fall back to ascending vocabulary id on both poles.
    pub fn describe_topics(&self, top_k: usize) -> Result<Vec<TopicDescription>> {
        if top_k < 1 || top_k > self.vocab.len() {
            return Err(Error::InvalidArgument(format!(
                "top_k must be in 1..={}, got {top_k}",
                self.vocab.len()
            )));
        }
        let mut out = Vec::with_capacity(self.n_topics);
        for t in 0..self.n_topics {
            let scores = self.term_topic.col(t);
            out.push(TopicDescription {
                topic_id: t,
                positive: rank_pole(&scores, &self.vocab, top_k, true),
                negative: rank_pole(&scores, &self.vocab, top_k, false),
            });
        }
        Ok(out)
    }

    /// Reads term coordinates along two topic axes straight out of the
    /// term-topic matrix. With no filter every vocabulary term is emitted,
    /// in id order.
    pub fn compass(&self, axis_x: usize, axis_y: usize, terms: Option<&[String]>) -> Result<CompassView> {
        for axis in [axis_x, axis_y] {
            if axis >= self.n_topics {
                return Err(Error::InvalidArgument(format!(
                    "axis {axis} out of range for {} topics",
                    self.n_topics
                )));
            }
        }
        let ids: Vec<u32> = match terms {
            Some(filter) => filter
                .iter()
                .map(|t| self.vocab.id(t).ok_or_else(|| Error::UnknownTerm(t.clone())))
                .collect::<Result<_>>()?,
            None => (0..self.vocab.len() as u32).collect(),
        };
        let points = ids
            .into_iter()
            .map(|id| CompassPoint {
                term: self.vocab.term(id).to_string(),
                x: self.term_topic[(id as usize, axis_x)],
                y: self.term_topic[(id as usize, axis_y)],
            })
            .collect();
        Ok(CompassView { axis_x, axis_y, degenerate_axes: axis_x == axis_y, points })
    }

    /// Negates one axis everywhere it appears, which exactly swaps that
    /// topic's positive and negative term lists.
    pub fn flip_topic_sign(&mut self, topic: usize) {
        self.mixing.negate_col(topic);
        self.unmixing.negate_row(topic);
        self.doc_topic.negate_col(topic);
        self.term_topic.negate_col(topic);
    }
}

/// Top `top_k` terms of one score column: highest first when `descending`,
/// lowest first otherwise. Equal scores fall back to ascending term id.
pub(crate) fn rank_pole(scores: &[f64], vocab: &Vocabulary, top_k: usize, descending: bool) -> Vec<(String, f64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = if descending {
            scores[b].partial_cmp(&scores[a])
        } else {
            scores[a].partial_cmp(&scores[b])
        };
        by_score.expect("finite scores").then(a.cmp(&b))
    });
    order[..top_k]
        .iter()
        .map(|&j| (vocab.term(j as u32).to_string(), scores[j]))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ModelHeader {
    version: u32,
    n_topics: usize,
    input_dims: usize,
    n_docs: usize,
    n_terms: usize,
    seed: u64,
    center_terms: bool,
    converged: bool,
    n_iter: usize,
    fit_runtime: f64,
    vocab_hash: u64,
    vocab: Vocabulary,
}

fn fnv1a64(terms: &[String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for term in terms {
        for &b in term.as_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= b'\n' as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn crc32(bytes: &[u8]) -> u32 {
    let mut table = [0u32; 256];
    for (i, slot) in table.iter_mut().enumerate() {
        let mut c = i as u32;
        for _ in 0..8 {
            c = if c & 1 != 0 { 0xedb8_8320 ^ (c >> 1) } else { c >> 1 };
        }
        *slot = c;
    }
    let mut crc = 0xffff_ffffu32;
    for &b in bytes {
        crc = table[((crc ^ b as u32) & 0xff) as usize] ^ (crc >> 8);
    }
    crc ^ 0xffff_ffff
}

fn push_section(buf: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_model(model: &S3Model, path: &Path) -> Result<()> {
    let header = ModelHeader {
        version: MODEL_VERSION,
        n_topics: model.n_topics,
        input_dims: model.input_dims(),
        n_docs: model.doc_topic.rows(),
        n_terms: model.term_topic.rows(),
        seed: model.seed.0,
        center_terms: model.center_terms,
        converged: model.converged,
        n_iter: model.n_iter,
        fit_runtime: model.fit_runtime,
        vocab_hash: fnv1a64(model.vocab.terms()),
        vocab: model.vocab.clone(),
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| Error::InvalidArgument(format!("model header serialization failed: {e}")))?;

    let mut buf = Vec::new();
    buf.extend_from_slice(MODEL_MAGIC);
    buf.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header_json);
    push_section(&mut buf, &model.whitener.mean);
    push_section(&mut buf, model.whitener.transform.data());
    push_section(&mut buf, model.whitener.inverse_transform.data());
    push_section(&mut buf, model.mixing.data());
    push_section(&mut buf, model.unmixing.data());
    push_section(&mut buf, model.doc_topic.data());
    push_section(&mut buf, model.term_topic.data());
    let crc = crc32(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    write_atomic(path, &buf)
}

struct SectionReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: String,
}

impl SectionReader<'_> {
    fn floats(&mut self, count: usize, what: &str) -> Result<Vec<f64>> {
        if self.pos + 8 * count > self.bytes.len() {
            return Err(Error::Binary {
                path: self.path.clone(),
                offset: self.pos,
                msg: format!("truncated {what} section"),
            });
        }
        let out = self.bytes[self.pos..self.pos + 8 * count]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        self.pos += 8 * count;
        Ok(out)
    }

    fn matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<Matrix<f64>> {
        Ok(Matrix::from_vec(rows, cols, self.floats(rows * cols, what)?))
    }
}

pub fn load_model(path: &Path) -> Result<S3Model> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let pathstr = path.display().to_string();
    let fail = |offset: usize, msg: String| Error::Binary { path: pathstr.clone(), offset, msg };

    if bytes.len() < 12 {
        return Err(fail(0, "file too short for model header".into()));
    }
    if &bytes[..4] != MODEL_MAGIC {
        return Err(fail(0, format!("bad magic {:?}, expected {MODEL_MAGIC:?}", &bytes[..4])));
    }
    let header_len = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    if 8 + header_len + 4 > bytes.len() {
        return Err(fail(8, "header length exceeds file size".into()));
    }
    let header: ModelHeader = serde_json::from_slice(&bytes[8..8 + header_len])
        .map_err(|e| fail(8, format!("header parse failed: {e}")))?;
    if header.version != MODEL_VERSION {
        return Err(Error::UnsupportedModelVersion {
            found: header.version,
            supported: MODEL_VERSION,
        });
    }
    let body = &bytes[..bytes.len() - 4];
    let stored_crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().expect("4 bytes"));
    if crc32(body) != stored_crc {
        return Err(Error::Checksum { path: pathstr });
    }

    let (k, d, n, m) = (header.n_topics, header.input_dims, header.n_docs, header.n_terms);
    let mut r = SectionReader { bytes: body, pos: 8 + header_len, path: pathstr.clone() };
    let mean = r.floats(d, "mean")?;
    let transform = r.matrix(k, d, "whitening transform")?;
    let inverse_transform = r.matrix(d, k, "whitening inverse")?;
    let mixing = r.matrix(d, k, "mixing")?;
    let unmixing = r.matrix(k, d, "unmixing")?;
    let doc_topic = r.matrix(n, k, "document-topic")?;
    let term_topic = r.matrix(m, k, "term-topic")?;
    if r.pos != body.len() {
        return Err(fail(r.pos, format!("{} trailing bytes after sections", body.len() - r.pos)));
    }

    let mut vocab = header.vocab;
    vocab.reindex();
    if fnv1a64(vocab.terms()) != header.vocab_hash {
        return Err(fail(8, "vocabulary hash mismatch".into()));
    }
    if vocab.len() != m {
        return Err(fail(8, format!("vocabulary size {} != term rows {m}", vocab.len())));
    }

    Ok(S3Model {
        n_topics: k,
        whitener: Whitener { mean, transform, inverse_transform },
        mixing,
        unmixing,
        doc_topic,
        term_topic,
        vocab,
        seed: RngSeed(header.seed),
        center_terms: header.center_terms,
        converged: header.converged,
        n_iter: header.n_iter,
        fit_runtime: header.fit_runtime,
    })
}
