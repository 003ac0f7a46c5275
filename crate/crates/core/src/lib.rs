//! Factorization of directed, unweighted graphs into a direct (Kronecker)
//! product `G = G1 ⊗ G2`.
//!
//! The heart of the crate is [`search::alternate_local_search`], which looks
//! for a symmetric permutation `P` of the adjacency matrix `A` such that
//! `Pᵀ A P = B ⊗ C` with binary `B`, `C` of prescribed sides. Every reported
//! success carries that certificate and can be re-checked with
//! [`search::RunReport::verify`].

pub mod blocks;
pub mod error;
pub mod graph;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod oracle;
pub mod permutation;
pub mod search;

pub use blocks::BlockGrid;
pub use error::{Error, Result};
pub use graph::Graph;
pub use matrix::BinaryMatrix;
pub use metrics::{FactorPair, MetricKind};
pub use permutation::Permutation;
pub use search::{alternate_local_search, RunReport, SearchConfig};
