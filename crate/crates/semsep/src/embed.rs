//! Dense embeddings for documents and vocabulary terms: binary/CSV loading,
//! word-vector tables, and the averaged static encoder.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Vocabulary};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const EMB1_MAGIC: &[u8; 4] = b"EMB1";

/// Row-major matrix of 32-bit embeddings with optional per-row string keys.
/// Stored in 32 bits; downstream arithmetic widens to 64.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f32>,
    row_labels: Option<Vec<String>>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dims: usize, data: Vec<f32>, row_labels: Option<Vec<String>>) -> Result<Self> {
        if data.len() != rows * dims {
            return Err(Error::DimensionMismatch {
                context: "embedding payload".into(),
                expected: rows * dims,
                got: data.len(),
            });
        }
        if let Some(labels) = &row_labels {
            if labels.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "embedding row labels".into(),
                    expected: rows,
                    got: labels.len(),
                });
            }
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("embedding matrix".into()));
        }
        Ok(EmbeddingMatrix { rows, dims, data, row_labels })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    /// Widens storage to the 64-bit working matrix used by the numerics.
    pub fn to_working(&self) -> Matrix<f64> {
        Matrix::from_vec(self.rows, self.dims, self.data.iter().map(|&v| v as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingFormat {
    Emb1Binary,
    Csv,
}

impl std::str::FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "emb1" | "emb1-binary" => Ok(EmbeddingFormat::Emb1Binary),
            "csv" => Ok(EmbeddingFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown embedding format {other:?}"))),
        }
    }
}

pub fn load_embeddings(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingMatrix> {
    match format {
        EmbeddingFormat::Emb1Binary => load_emb1(path),
        EmbeddingFormat::Csv => load_csv(path),
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: String,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Binary {
                path: self.path.clone(),
                offset: self.pos,
                msg: format!("truncated while reading {what} ({n} bytes needed, {} left)", self.bytes.len() - self.pos),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32_le(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
}

fn load_emb1(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = ByteReader { bytes: &bytes, pos: 0, path: path.display().to_string() };

    let magic = r.take(4, "magic bytes")?;
    if magic != EMB1_MAGIC {
        return Err(Error::Binary {
            path: r.path,
            offset: 0,
            msg: format!("bad magic {magic:?}, expected {EMB1_MAGIC:?}"),
        });
    }
    let rows = r.u32_le("row count")? as usize;
    let dims = r.u32_le("dim count")? as usize;
    let has_labels = r.u8("label flag")?;
    if has_labels > 1 {
        return Err(Error::Binary {
            path: r.path,
            offset: 12,
            msg: format!("label flag must be 0 or 1, got {has_labels}"),
        });
    }

    let row_labels = if has_labels == 1 {
        let mut labels = Vec::with_capacity(rows);
        for i in 0..rows {
            let len = r.u32_le("label length")? as usize;
            let start = r.pos;
            let raw = r.take(len, "label bytes")?;
            let label = std::str::from_utf8(raw).map_err(|e| Error::Binary {
                path: path.display().to_string(),
                offset: start,
                msg: format!("label {i} is not valid UTF-8: {e}"),
            })?;
            labels.push(label.to_string());
        }
        Some(labels)
    } else {
        None
    };

    let mut data = Vec::with_capacity(rows * dims);
    for i in 0..rows * dims {
        let at = r.pos;
        let b = r.take(4, "payload value")?;
        let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        if !v.is_finite() {
            return Err(Error::Binary {
                path: path.display().to_string(),
                offset: at,
                msg: format!("non-finite value {v} at element {i}"),
            });
        }
        data.push(v);
    }
    if r.pos != bytes.len() {
        return Err(Error::Binary {
            path: r.path,
            offset: r.pos,
            msg: format!("{} trailing bytes after payload", bytes.len() - r.pos),
        });
    }
    EmbeddingMatrix::new(rows, dims, data, row_labels)
}

fn load_csv(path: &Path) -> Result<EmbeddingMatrix> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut data: Vec<f32> = Vec::new();
    let mut dims: Option<usize> = None;
    let mut rows = 0usize;
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut width = 0usize;
        for field in line.split(',') {
            let v: f32 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("not a number: {field:?}"),
            })?;
            data.push(v);
            width += 1;
        }
        match dims {
            None => dims = Some(width),
            Some(d) if d != width => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    msg: format!("expected {d} fields, got {width}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    EmbeddingMatrix::new(rows, dims.unwrap_or(0), data, None)
}

/// Writes the EMB1 binary representation atomically (temp file + rename).
pub fn save_embeddings(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    if m.rows == 0 || m.dims == 0 {
        return Err(Error::InvalidArgument("refusing to save empty matrix".into()));
    }
    if !m.data.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("embedding matrix being saved".into()));
    }
    let mut buf: Vec<u8> = Vec::with_capacity(13 + 4 * m.data.len());
    buf.extend_from_slice(EMB1_MAGIC);
    buf.extend_from_slice(&(m.rows as u32).to_le_bytes());
    buf.extend_from_slice(&(m.dims as u32).to_le_bytes());
    match &m.row_labels {
        Some(labels) => {
            buf.push(1);
            for label in labels {
                buf.extend_from_slice(&(label.len() as u32).to_le_bytes());
                buf.extend_from_slice(label.as_bytes());
            }
        }
        None => buf.push(0),
    }
    for v in &m.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &buf)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// token → vector map with fixed dimensionality. Entries keep first-insert
/// order so that serialization is reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVectorTable {
    dims: usize,
    entries: Vec<(String, Vec<f32>)>,
    index: HashMap<String, usize>,
}

impl WordVectorTable {
    pub fn new(dims: usize) -> Self {
        WordVectorTable { dims, entries: Vec::new(), index: HashMap::new() }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&i| self.entries[i].1.as_slice())
    }

    /// Inserts or overwrites; the token keeps its original position when
    /// overwritten.
    pub fn insert(&mut self, token: String, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dims {
            return Err(Error::DimensionMismatch {
                context: format!("vector for token {token:?}"),
                expected: self.dims,
                got: vector.len(),
            });
        }
        if !vector.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("vector for token {token:?}")));
        }
        match self.index.get(&token) {
            Some(&i) => self.entries[i].1 = vector,
            None => {
                self.index.insert(token.clone(), self.entries.len());
                self.entries.push((token, vector));
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.entries.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    /// Writes the table as text: token followed by its components,
    /// space-separated, one entry per line. Atomic like the binary writer.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (token, vec) in &self.entries {
            out.push_str(token);
            for v in vec {
                out.push(' ');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }
}

/// Parses a text file of `token v1 v2 ... vd` lines. The first line fixes
/// the dimensionality; duplicate tokens keep the last vector seen.
pub fn load_word_vectors(path: &Path) -> Result<WordVectorTable> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table: Option<WordVectorTable> = None;
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-empty line has a first field");
        let values: Vec<f32> = fields
            .map(|f| {
                f.parse().map_err(|_| Error::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    msg: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        let table = table.get_or_insert_with(|| WordVectorTable::new(values.len()));
        if values.len() != table.dims() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected {} components, got {}", table.dims(), values.len()),
            });
        }
        table.insert(token.to_string(), values)?;
    }
    table.ok_or_else(|| Error::InvalidArgument(format!("no word vectors in {}", path.display())))
}

/// Encodes each document as the arithmetic mean of the vectors of its
/// in-table tokens; documents with no in-table tokens become zero rows.
/// Row labels are the document ids.
pub fn encode_documents_static<T>(docs: &[Document], table: &WordVectorTable, tokenizer: T) -> Result<EmbeddingMatrix>
where
    T: Fn(&str) -> Vec<String>,
{
    if table.is_empty() {
        return Err(Error::InvalidArgument("word-vector table is empty".into()));
    }
    let dims = table.dims();
    let mut data = vec![0.0f32; docs.len() * dims];
    let mut labels = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        labels.push(doc.id.clone());
        // Accumulate in 64-bit, store the mean back in 32.
        let mut acc = vec![0.0f64; dims];
        let mut hits = 0usize;
        for token in tokenizer(&doc.text) {
            if let Some(vec) = table.get(&token) {
                for (a, &v) in acc.iter_mut().zip(vec) {
                    *a += v as f64;
                }
                hits += 1;
            }
        }
        if hits > 0 {
            let row = &mut data[i * dims..(i + 1) * dims];
            for (slot, a) in row.iter_mut().zip(&acc) {
                *slot = (a / hits as f64) as f32;
            }
        }
    }
    EmbeddingMatrix::new(docs.len(), dims, data, Some(labels))
}

pub enum VocabularySource<'a> {
    /// Vectors looked up per term; missing terms get a zero row and are
    /// reported back for the caller to surface as a warning.
    StaticTable(&'a WordVectorTable),
    /// Precomputed rows keyed by label; must cover the vocabulary exactly,
    /// extra rows are ignored.
    Precomputed(&'a EmbeddingMatrix),
}

#[derive(Debug)]
pub struct VocabularyEncoding {
    pub matrix: EmbeddingMatrix,
    /// Terms that received a zero vector (static-table source only).
    pub missing_terms: Vec<String>,
}

/// Produces the term-embedding matrix with rows in vocabulary id order.
pub fn encode_vocabulary(vocab: &Vocabulary, source: VocabularySource<'_>) -> Result<VocabularyEncoding> {
    match source {
        VocabularySource::StaticTable(table) => {
            if table.is_empty() {
                return Err(Error::InvalidArgument("word-vector table is empty".into()));
            }
            let dims = table.dims();
            let mut data = vec![0.0f32; vocab.len() * dims];
            let mut missing = Vec::new();
            for (t, term) in vocab.terms().iter().enumerate() {
                match table.get(term) {
                    Some(vec) => data[t * dims..(t + 1) * dims].copy_from_slice(vec),
                    None => missing.push(term.clone()),
                }
            }
            let matrix = EmbeddingMatrix::new(vocab.len(), dims, data, Some(vocab.terms().to_vec()))?;
            Ok(VocabularyEncoding { matrix, missing_terms: missing })
        }
        VocabularySource::Precomputed(m) => {
            let labels = m.row_labels().ok_or(Error::MissingRowLabels)?;
            let by_label: HashMap<&str, usize> =
                labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
            let mut missing = Vec::new();
            let mut data = vec![0.0f32; vocab.len() * m.dims()];
            for (t, term) in vocab.terms().iter().enumerate() {
                match by_label.get(term.as_str()) {
                    Some(&i) => data[t * m.dims()..(t + 1) * m.dims()].copy_from_slice(m.row(i)),
                    None => missing.push(term.clone()),
                }
            }
            if !missing.is_empty() {
                let total = missing.len();
                missing.truncate(10);
                return Err(Error::MissingVocabularyTerms { listed: missing, total });
            }
            let matrix = EmbeddingMatrix::new(vocab.len(), m.dims(), data, Some(vocab.terms().to_vec()))?;
            Ok(VocabularyEncoding { matrix, missing_terms: Vec::new() })
        }
    }
}
