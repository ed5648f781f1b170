//! Exact oracle, accuracy metrics, confidence intervals and the scaled error
//! experiments.

pub mod experiment;
pub mod metrics;
pub mod oracle;
pub mod stats;

pub use experiment::{
    run_experiment, Cell, CellAggregate, CellStatus, ExperimentConfig, ExperimentResult, Preset, RunRecord, ScaleConfig,
};
pub use metrics::{score, MetricsReport};
pub use oracle::{exact_frequencies, true_frequent, FrequencyTable};
pub use stats::{chi_squared_gof, confidence_interval, rank_goodness_of_fit, t_quantile, CiSummary, GofResult};
