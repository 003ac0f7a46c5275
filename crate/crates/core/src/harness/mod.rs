//! Instance generation, batch experiments and their file formats.

mod batch;
mod growth;
mod instance;
pub mod io;

pub use batch::{derive_seed, run_batch, solve_all_divisor_splits, BatchReport, BatchStats, RunRecord, SplitReport};
pub use growth::{growth_study, time_slope, GrowthParams, GrowthRow};
pub use instance::{generate_instance, sample_factor, Hidden, Instance, InstanceSpec};
