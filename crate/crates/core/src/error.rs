use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity k must be at least 2, got {0}")]
    InvalidCapacity(usize),

    #[error("summaries were built with different capacities ({left} vs {right})")]
    CapacityMismatch { left: usize, right: usize },

    #[error("summary holds {nz} counters but capacity is {k}")]
    Overfull { nz: usize, k: usize },

    #[error("item {0} appears more than once in a summary")]
    DuplicateItem(u32),

    #[error("counter for item {0} has zero frequency")]
    ZeroFrequency(u32),

    #[error("stream length must be at least 1")]
    EmptyStream,

    #[error("invalid worker count p={p} for stream of length n={n}")]
    InvalidWorkerCount { p: usize, n: usize },

    #[error("rank {rank} out of range for {p} workers")]
    RankOutOfRange { rank: usize, p: usize },

    #[error("reduction needs at least one summary")]
    EmptyReduction,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("rank {x} outside universe 1..={universe}")]
    RankOutOfUniverse { x: u64, universe: u64 },

    #[error("need at least 2 samples for a confidence interval, got {0}")]
    TooFewSamples(usize),

    #[error("malformed summary encoding: {0}")]
    Decode(String),

    #[error("malformed input at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("worker {0} failed during the reduction")]
    Worker(usize),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}
