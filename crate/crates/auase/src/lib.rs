//! Attributed unfolded adjacency spectral embedding for dynamic networks.
//!
//! The crate provides:
//!
//! - sparse/dense matrix kernels ([`mat`]),
//! - a randomized truncated SVD with a dense Jacobi oracle ([`svd`]),
//! - a generative simulator for dynamic attributed stochastic block models
//!   ([`model`]),
//! - the embedding pipeline itself ([`embedding`]),
//! - stability and convergence diagnostics ([`stability`]),
//! - downstream evaluation harnesses ([`eval`]),
//! - plain-text I/O for networks, covariates, and model configs ([`io`]).
//!
//! Everything is deterministic given a seed: the same inputs and seed
//! produce byte-identical outputs across runs.

pub mod cluster;
pub mod embedding;
pub mod eval;
pub mod io;
pub mod mat;
pub mod model;
pub mod stability;
pub mod svd;
pub mod util;
