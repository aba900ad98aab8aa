//! Temporally aligned word embeddings.
//!
//! The pipeline turns a time-sliced corpus into per-slice co-occurrence
//! statistics ([`corpus`]), converts those to sparse PPMI matrices ([`ppmi`]),
//! and jointly factorizes all slices with a temporal smoothing penalty using
//! block coordinate descent ([`solver`]). The [`baselines`] module provides the
//! comparison systems (pooled static factorization, per-slice factorization
//! with local linear or orthogonal Procrustes alignment) and [`eval`] scores
//! any of them with clustering and cross-time retrieval metrics.
//!
//! Hot loops run on rayon when the `parallel` feature is enabled (default).
//! Every result is bit-identical between the sequential and parallel paths.

pub mod baselines;
pub mod binio;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod exec;
pub mod ppmi;
pub mod seed;
pub mod solver;
pub mod sparse;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Exec;
