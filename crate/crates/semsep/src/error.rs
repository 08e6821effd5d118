use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("format error in {path} at byte {offset}: {msg}")]
    Binary { path: String, offset: usize, msg: String },

    #[error("duplicate document id {0:?}")]
    DuplicateDocumentId(String),

    #[error("corpus contains no documents")]
    EmptyCorpus,

    #[error("no vocabulary terms retained")]
    EmptyVocabulary,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("rank deficient: requested {requested} components but effective rank is {effective}")]
    RankDeficient { requested: usize, effective: usize },

    #[error("{what} did not converge within {limit} iterations")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("embedding rows carry no labels, which are required here")]
    MissingRowLabels,

    #[error("term embeddings missing {total} vocabulary terms (first {n}: {terms:?})", n = listed.len(), terms = listed)]
    MissingVocabularyTerms { listed: Vec<String>, total: usize },

    #[error("unknown term {0:?}")]
    UnknownTerm(String),

    #[error("checksum mismatch in {path}")]
    Checksum { path: String },

    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedModelVersion { found: u32, supported: u32 },

    #[error("no topic had enough scorable term pairs")]
    NoScorableTopics,

    #[error("not implemented: {0}")]
    NotImplemented(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
