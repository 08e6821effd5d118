//! Linear-algebra core: symmetric eigendecomposition, SVD, whitening,
//! FastICA, pseudo-inverse, and the Amari recovery index.
//!
//! Everything here is deterministic: fits are single-threaded with fixed
//! reduction order, and randomized initialization draws from ChaCha8.

mod amari;
mod eigh;
mod fasttanh;
mod ica;
mod svd;
mod whiten;

pub use amari::amari_index;
pub use eigh::eigh_symmetric;
pub use ica::{fastica, IcaOptions, IcaResult, Nonlinearity, RngSeed};
pub use svd::{pseudo_inverse, svd, Svd};
pub use whiten::{fit_whitener, Whitener};
