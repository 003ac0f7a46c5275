//! Permutation local search for Kronecker factorizations.

mod alternate;
mod config;
mod grouping;
mod onion;
mod outsiders;
mod perturb;

pub use alternate::{
    alternate_local_search, alternate_local_search_traced, RunReport, SearchEvent, SearchState,
};
pub use config::SearchConfig;
pub use grouping::{grouping_candidates, kron_grouping, GroupingCandidate};
pub use onion::{cornerize, onion_search, weight_matrix, CornerizeOutcome, OnionOutcome};
pub use outsiders::{outsiders, scored_swaps, Outsiders};
pub use perturb::random_perturbation;
