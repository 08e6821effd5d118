//! Corpus ingestion: documents, tokenization, vocabulary statistics, and
//! sparse bag-of-words matrices.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    /// One JSON object per line with a required "text" field and an
    /// optional "id" field (defaulting to the 1-based line number).
    Jsonl,
    /// A directory of *.txt files; each file is one document and the file
    /// stem is its id. Files are read in filename order.
    PlaintextDir,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "txt-dir" | "plaintext-dir" => Ok(CorpusFormat::PlaintextDir),
            other => Err(Error::InvalidArgument(format!("unknown corpus format {other:?}"))),
        }
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>> {
    match format {
        CorpusFormat::Jsonl => load_jsonl(path),
        CorpusFormat::PlaintextDir => load_plaintext_dir(path),
    }
}

fn load_jsonl(path: &Path) -> Result<Vec<Document>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno,
            msg: e.to_string(),
        })?;
        let text = value
            .get("text")
            .and_then(|t| t.as_str())
            .ok_or_else(|| Error::Parse {
                path: path.display().to_string(),
                line: lineno,
                msg: "missing string field \"text\"".into(),
            })?
            .to_string();
        let id = match value.get("id") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(other) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: lineno,
                    msg: format!("field \"id\" must be a string, got {other}"),
                })
            }
            None => lineno.to_string(),
        };
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDocumentId(id));
        }
        docs.push(Document { id, text });
    }
    Ok(docs)
}

fn load_plaintext_dir(path: &Path) -> Result<Vec<Document>> {
    let entries = fs::read_dir(path).map_err(|e| Error::io(path, e))?;
    let mut files: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    files.sort();
    let mut docs = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let id = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        docs.push(Document { id, text });
    }
    Ok(docs)
}

/// Splits text into lowercased tokens: maximal runs of Unicode
/// alphanumerics and underscores, with apostrophes and hyphens kept when
/// they sit inside a run. Tokens shorter than two characters are dropped,
/// so digit-bearing terms like "x11r5" and underscore terms like "_o"
/// survive while single letters do not.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' || ch == '\'' || ch == '-' {
            for lower in ch.to_lowercase() {
                cur.push(lower);
            }
        } else {
            flush_token(&mut cur, &mut out);
        }
    }
    flush_token(&mut cur, &mut out);
    out
}

fn flush_token(cur: &mut String, out: &mut Vec<String>) {
    if !cur.is_empty() {
        let trimmed = cur.trim_matches(|c| c == '\'' || c == '-');
        if trimmed.chars().count() >= 2 {
            out.push(trimmed.to_string());
        }
        cur.clear();
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    term_to_id: HashMap<String, u32>,
    doc_freq: Vec<u32>,
    total_count: Vec<u64>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.term_to_id.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, id: u32) -> u32 {
        self.doc_freq[id as usize]
    }

    pub fn total_count(&self, id: u32) -> u64 {
        self.total_count[id as usize]
    }

    pub(crate) fn from_parts(terms: Vec<String>, doc_freq: Vec<u32>, total_count: Vec<u64>, n_docs: usize) -> Self {
        let term_to_id = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { terms, term_to_id, doc_freq, total_count, n_docs }
    }

    /// Rebuilds the term→id map after deserialization.
    pub fn reindex(&mut self) {
        self.term_to_id = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }
}

/// Collects vocabulary statistics over the corpus, retaining terms with
/// `doc_freq >= min_df` and `doc_freq / n_docs <= max_df_ratio`. Term ids
/// follow first occurrence order.
pub fn build_vocabulary(docs: &[Document], min_df: u32, max_df_ratio: f64) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if min_df < 1 {
        return Err(Error::InvalidArgument("min_df must be at least 1".into()));
    }
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::InvalidArgument("max_df_ratio must be in (0, 1]".into()));
    }

    struct Stat {
        df: u32,
        total: u64,
        last_doc: usize,
    }
    let mut order: Vec<String> = Vec::new();
    let mut stats: HashMap<String, Stat> = HashMap::new();
    for (doc_idx, doc) in docs.iter().enumerate() {
        for token in tokenize(&doc.text) {
            match stats.get_mut(&token) {
                Some(stat) => {
                    stat.total += 1;
                    if stat.last_doc != doc_idx {
                        stat.df += 1;
                        stat.last_doc = doc_idx;
                    }
                }
                None => {
                    stats.insert(token.clone(), Stat { df: 1, total: 1, last_doc: doc_idx });
                    order.push(token);
                }
            }
        }
    }

    let n_docs = docs.len();
    let mut terms = Vec::new();
    let mut doc_freq = Vec::new();
    let mut total_count = Vec::new();
    for term in order {
        let stat = &stats[&term];
        if stat.df >= min_df && stat.df as f64 / n_docs as f64 <= max_df_ratio {
            terms.push(term);
            doc_freq.push(stat.df);
            total_count.push(stat.total);
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(Vocabulary::from_parts(terms, doc_freq, total_count, n_docs))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Count,
    #[default]
    Tfidf,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Weighting::Count),
            "tfidf" => Ok(Weighting::Tfidf),
            other => Err(Error::InvalidArgument(format!("unknown weighting {other:?}"))),
        }
    }
}

/// Sparse document×term matrix in compressed-row form with sorted column
/// indices inside each row.
#[derive(Clone, Debug, PartialEq)]
pub struct BowMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl BowMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_entries(&self, i: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: u32) -> f64 {
        let (cols, vals) = self.row_entries(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Per-column postings lists: (row, value) pairs in row order.
    pub fn col_postings(&self) -> Vec<Vec<(u32, f64)>> {
        let mut posts = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (&c, &v) in cols.iter().zip(vals) {
                posts[c as usize].push((i as u32, v));
            }
        }
        posts
    }

    /// Mean over all rows×cols positions, zeros included.
    pub fn mean_all(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / (self.rows * self.cols) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// self · rhs for dense rhs (cols × p).
    pub fn mul_dense(&self, rhs: &Matrix<f64>) -> Matrix<f64> {
        assert_eq!(self.cols, rhs.rows());
        let p = rhs.cols();
        let mut out = Matrix::zeros(self.rows, p);
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            let out_row = out.row_mut(i);
            for (&c, &v) in cols.iter().zip(vals) {
                for (slot, &r) in out_row.iter_mut().zip(rhs.row(c as usize)) {
                    *slot += v * r;
                }
            }
        }
        out
    }

    /// selfᵀ · rhs for dense rhs (rows × p).
    pub fn transpose_mul_dense(&self, rhs: &Matrix<f64>) -> Matrix<f64> {
        assert_eq!(self.rows, rhs.rows());
        let p = rhs.cols();
        let mut out = Matrix::zeros(self.cols, p);
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let out_row = out.row_mut(c as usize);
                for (slot, &r) in out_row.iter_mut().zip(rhs.row(i)) {
                    *slot += v * r;
                }
            }
        }
        out
    }

    /// Dense selfᵀ·self (cols × cols), accumulated row by row.
    pub fn gram_terms(&self) -> Matrix<f64> {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row_entries(i);
            for (&ca, &va) in cols.iter().zip(vals) {
                for (&cb, &vb) in cols.iter().zip(vals) {
                    g[(ca as usize, cb as usize)] += va * vb;
                }
            }
        }
        g
    }

    /// Dense self·selfᵀ (rows × rows) via sorted-merge row dot products.
    pub fn gram_docs(&self) -> Matrix<f64> {
        let mut g = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let (ci, vi) = self.row_entries(i);
                let (cj, vj) = self.row_entries(j);
                let mut dot = 0.0;
                let (mut a, mut b) = (0, 0);
                while a < ci.len() && b < cj.len() {
                    match ci[a].cmp(&cj[b]) {
                        std::cmp::Ordering::Less => a += 1,
                        std::cmp::Ordering::Greater => b += 1,
                        std::cmp::Ordering::Equal => {
                            dot += vi[a] * vj[b];
                            a += 1;
                            b += 1;
                        }
                    }
                }
                g[(i, j)] = dot;
                g[(j, i)] = dot;
            }
        }
        g
    }

    pub fn from_rows_of_pairs(rows: usize, cols: usize, entries: Vec<Vec<(u32, f64)>>) -> Self {
        assert_eq!(entries.len(), rows);
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in entries {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                debug_assert!((c as usize) < cols);
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        BowMatrix { rows, cols, row_ptr, col_idx, values }
    }
}

/// Counts (or tf-idf weights) of vocabulary terms per document.
/// Out-of-vocabulary tokens are dropped. In tf-idf mode each count is
/// scaled by `1 + ln(n_docs / (1 + doc_freq))` and the row is then
/// L2-normalized; the document-frequency statistics come from the
/// vocabulary, not from `docs`.
pub fn bow_counts(docs: &[Document], vocab: &Vocabulary, weighting: Weighting) -> BowMatrix {
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        for token in tokenize(&doc.text) {
            if let Some(id) = vocab.id(&token) {
                *counts.entry(id).or_insert(0.0) += 1.0;
            }
        }
        let mut row: Vec<(u32, f64)> = counts.into_iter().collect();
        if weighting == Weighting::Tfidf {
            for (id, v) in &mut row {
                let idf = 1.0 + (vocab.n_docs as f64 / (1.0 + vocab.doc_freq(*id) as f64)).ln();
                *v *= idf;
            }
            let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, v) in &mut row {
                    *v /= norm;
                }
            }
        }
        rows.push(row);
    }
    BowMatrix::from_rows_of_pairs(docs.len(), vocab.len(), rows)
}
