//! Frequent items with Space Saving summaries, sequentially and in parallel.
//!
//! The crate covers the sequential summary ([`summary`]), two ways of merging
//! summaries ([`merge`]), the block-decomposed parallel pipeline with its
//! tree reduction ([`driver`]), Zipf/Hurwitz stream generators ([`datagen`])
//! and an evaluation harness built on an exact counting oracle ([`eval`]).

pub mod datagen;
pub mod driver;
pub mod error;
pub mod eval;
pub mod io;
pub mod merge;
pub mod summary;
pub mod wire;

pub use datagen::{probability, sample_stream, DistSpec, Distribution, Family};
pub use driver::{
    block_bounds, finish, local_summaries, reduce_tree, run_parallel, run_parallel_detailed, simulate, BlockAssignment,
    Execution, ReductionPlan, Strategy, Traffic,
};
pub use error::{Error, Result};
pub use eval::{exact_frequencies, score, true_frequent, FrequencyTable, MetricsReport};
pub use merge::{agarwal_merge_step, agarwal_normalize, combine, merge_step, CombinedSummary, MergeStats};
pub use summary::{majority_threshold, process, Counter, FrequentReport, Item, ReportEntry, Summary};
