//! Topic modeling by blind source separation of document embeddings.
//!
//! Documents are represented as dense embedding vectors. Fitting a model
//! whitens the embedding matrix, runs FastICA to find statistically
//! independent semantic axes, and scores every vocabulary term along each
//! axis, so a topic is described both by its highest-scoring (positive)
//! and lowest-scoring (negative) terms. The crate also ships classical
//! bag-of-words baselines (NMF, LSA), a skip-gram negative-sampling word
//! vector trainer, topic-quality metrics (diversity, embedding coherence,
//! NPMI, stop-word and non-alphabetic rates), and a benchmark harness
//! that runs model/topic-count grids reproducibly.
//!
//! Linear algebra lives in [`matrix`] and [`numerics`] and is generic over
//! the scalar type via [`Scalar`]; the pipeline instantiates `f64` for all
//! arithmetic while embedding files store `f32`.

pub mod baselines;
pub mod bench;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod numerics;
pub mod s3;
pub mod scalar;
pub mod wordvec;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense matrix with 64-bit entries, the working type of the fitting pipeline.
pub type Mat = matrix::Matrix<f64>;
/// Dense matrix with 32-bit entries, the storage type of embedding files.
pub type Mat32 = matrix::Matrix<f32>;
