//! Topic-quality metrics: diversity, word-embedding coherence, NPMI
//! co-occurrence coherence, stop-word rate, and non-alphabetic rate,
//! plus the per-run report record they land in.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Document};
use crate::embed::WordVectorTable;
use crate::error::{Error, Result};
use crate::wordvec::cosine;

/// One benchmark cell. Field order is the serialization order for both
/// CSV and JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub model_name: String,
    pub encoder_tag: String,
    pub n_topics: usize,
    pub diversity: f64,
    pub wec_in: Option<f64>,
    pub wec_ex: Option<f64>,
    pub npmi: Option<f64>,
    pub stopword_rate: f64,
    pub nonalpha_rate: f64,
    pub runtime_seconds: f64,
    pub seed: u64,
}

pub const REPORT_FIELDS: [&str; 11] = [
    "model_name",
    "encoder_tag",
    "n_topics",
    "diversity",
    "wec_in",
    "wec_ex",
    "npmi",
    "stopword_rate",
    "nonalpha_rate",
    "runtime_seconds",
    "seed",
];

impl MetricReport {
    pub fn csv_header() -> String {
        REPORT_FIELDS.join(",")
    }

    /// One CSV line; floats print at full round-trip precision, absent
    /// metrics as empty fields.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_escape(&self.model_name),
            csv_escape(&self.encoder_tag),
            self.n_topics,
            self.diversity,
            opt(self.wec_in),
            opt(self.wec_ex),
            opt(self.npmi),
            self.stopword_rate,
            self.nonalpha_rate,
            self.runtime_seconds,
            self.seed,
        )
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn check_rectangular(topics: &[Vec<String>]) -> Result<usize> {
    if topics.is_empty() {
        return Err(Error::InvalidArgument("no topics given".into()));
    }
    let k = topics[0].len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty topic term list".into()));
    }
    for (t, list) in topics.iter().enumerate() {
        if list.len() != k {
            return Err(Error::InvalidArgument(format!(
                "ragged topic lists: topic 0 has {k} terms, topic {t} has {}",
                list.len()
            )));
        }
    }
    Ok(k)
}

/// |unique terms across all lists| / (n_topics × k).
pub fn diversity(topics: &[Vec<String>]) -> Result<f64> {
    let k = check_rectangular(topics)?;
    let unique: HashSet<&str> = topics.iter().flatten().map(|s| s.as_str()).collect();
    Ok(unique.len() as f64 / (topics.len() * k) as f64)
}

/// Mean pairwise cosine within each topic, averaged over topics. Pairs
/// with a term missing from the table are skipped; topics with no valid
/// pair are skipped; if that leaves nothing, it's an error.
pub fn wec(topics: &[Vec<String>], table: &WordVectorTable) -> Result<f64> {
    let k = check_rectangular(topics)?;
    if k < 2 {
        return Err(Error::InvalidArgument("wec needs at least 2 terms per topic".into()));
    }
    let mut topic_scores = Vec::new();
    for terms in topics {
        let vectors: Vec<Option<&[f32]>> = terms.iter().map(|t| table.get(t)).collect();
        let mut acc = 0.0;
        let mut pairs = 0usize;
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if let (Some(a), Some(b)) = (vectors[i], vectors[j]) {
                    acc += cosine(a, b)?;
                    pairs += 1;
                }
            }
        }
        if pairs > 0 {
            topic_scores.push(acc / pairs as f64);
        }
    }
    if topic_scores.is_empty() {
        return Err(Error::NoScorableTopics);
    }
    Ok(topic_scores.iter().sum::<f64>() / topic_scores.len() as f64)
}

/// NPMI evaluation with the per-term bookkeeping that the report layer
/// surfaces as warnings.
#[derive(Clone, Debug)]
pub struct NpmiDetail {
    pub value: f64,
    /// Terms that never occur in any window; their pairs scored −1.
    pub absent_terms: Vec<String>,
}

/// Normalized pointwise mutual information over boolean sliding windows.
///
/// Windows advance one token at a time inside each document; documents
/// shorter than the window contribute a single window. P(term) is the
/// fraction of windows containing it. A zero joint count scores the pair
/// at the −1 limit; a pair with P(ij) = 1 scores 1.
pub fn npmi_detailed(topics: &[Vec<String>], docs: &[Document], window: usize) -> Result<NpmiDetail> {
    check_rectangular(topics)?;
    if window < 2 {
        return Err(Error::InvalidArgument("npmi window must be at least 2".into()));
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let needed: HashSet<&str> = topics.iter().flatten().map(|s| s.as_str()).collect();
    let mut term_ids: HashMap<&str, usize> = HashMap::new();
    for t in &needed {
        let next = term_ids.len();
        term_ids.entry(t).or_insert(next);
    }
    let n_terms = term_ids.len();

    let mut single = vec![0u64; n_terms];
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut n_windows = 0u64;

    for doc in docs {
        let tokens = tokenize(&doc.text);
        if tokens.is_empty() {
            continue;
        }
        let ids: Vec<Option<usize>> =
            tokens.iter().map(|t| term_ids.get(t.as_str()).copied()).collect();
        let n_win = tokens.len().saturating_sub(window) + 1;
        for start in 0..n_win {
            let end = (start + window).min(tokens.len());
            let mut in_window: Vec<usize> = ids[start..end].iter().flatten().copied().collect();
            in_window.sort_unstable();
            in_window.dedup();
            n_windows += 1;
            for (a, &i) in in_window.iter().enumerate() {
                single[i] += 1;
                for &j in &in_window[a + 1..] {
                    *joint.entry((i, j)).or_insert(0) += 1;
                }
            }
        }
    }

    let total = n_windows as f64;
    let mut topic_scores = Vec::with_capacity(topics.len());
    for terms in topics {
        let mut acc = 0.0;
        let mut pairs = 0usize;
        for a in 0..terms.len() {
            for b in a + 1..terms.len() {
                let i = term_ids[terms[a].as_str()];
                let j = term_ids[terms[b].as_str()];
                if i == j {
                    // A term paired with itself always co-occurs with
                    // itself; the pair carries no information.
                    acc += 1.0;
                    pairs += 1;
                    continue;
                }
                let key = if i < j { (i, j) } else { (j, i) };
                let joint_count = joint.get(&key).copied().unwrap_or(0);
                let score = if joint_count == 0 {
                    -1.0
                } else {
                    let p_ij = joint_count as f64 / total;
                    let p_i = single[i] as f64 / total;
                    let p_j = single[j] as f64 / total;
                    if p_ij >= 1.0 {
                        1.0
                    } else {
                        (p_ij / (p_i * p_j)).ln() / -(p_ij.ln())
                    }
                };
                acc += score;
                pairs += 1;
            }
        }
        if pairs > 0 {
            topic_scores.push(acc / pairs as f64);
        }
    }
    if topic_scores.is_empty() {
        return Err(Error::NoScorableTopics);
    }
    let value = topic_scores.iter().sum::<f64>() / topic_scores.len() as f64;

    let mut absent: Vec<String> = needed
        .iter()
        .filter(|t| single[term_ids[**t]] == 0)
        .map(|t| t.to_string())
        .collect();
    absent.sort();
    Ok(NpmiDetail { value, absent_terms: absent })
}

pub fn npmi(topics: &[Vec<String>], docs: &[Document], window: usize) -> Result<f64> {
    Ok(npmi_detailed(topics, docs, window)?.value)
}

#[derive(Clone, Debug)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The bundled English list (318 entries).
    pub fn bundled() -> Self {
        Self::parse(include_str!("../assets/stopwords-en.txt")).expect("bundled list is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content)
    }

    /// One token per line; '#' starts a comment line; everything must
    /// already be lowercase.
    pub fn parse(content: &str) -> Result<Self> {
        let mut words = HashSet::new();
        for line in content.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.chars().any(|c| c.is_uppercase()) {
                return Err(Error::InvalidArgument(format!("stop word {line:?} is not lowercase")));
            }
            words.insert(line.to_string());
        }
        if words.is_empty() {
            return Err(Error::InvalidArgument("stop-word list is empty".into()));
        }
        Ok(StopwordList { words })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.words.contains(term)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Fraction of term slots that are stop words.
pub fn stopword_rate(topics: &[Vec<String>], list: &StopwordList) -> Result<f64> {
    let k = check_rectangular(topics)?;
    let hits = topics.iter().flatten().filter(|t| list.contains(t)).count();
    Ok(hits as f64 / (topics.len() * k) as f64)
}

/// Fraction of term slots containing at least one character outside
/// Unicode letters.
pub fn nonalpha_rate(topics: &[Vec<String>]) -> Result<f64> {
    let k = check_rectangular(topics)?;
    let hits = topics
        .iter()
        .flatten()
        .filter(|t| t.chars().any(|c| !c.is_alphabetic()))
        .count();
    Ok(hits as f64 / (topics.len() * k) as f64)
}

/// Markdown/CSV display helper: `mean ± 2·σ` over a slice, population σ.
pub fn mean_and_spread(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, 2.0 * var.sqrt())
}
