//! Desk-scale replays of the synthetic error experiments.
//!
//! | preset | n (full scale)       | k (full scale)      | rho              |
//! |--------|----------------------|---------------------|------------------|
//! | exp1   | 500M                 | 1000..=10000 by 1000 | 1.5             |
//! | exp2   | 100M..=1000M by 100M | 2000                | 1.5              |
//! | exp3   | 500M                 | 2000                | 0.5..=3.0 by 0.5 |
//!
//! [`ScaleConfig`] divides `n` and `k` down to desk size. Every cell runs
//! once per seed and strategy; all strategies see the same streams.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::datagen::{DistSpec, Distribution, Family, DEFAULT_HURWITZ_SHIFT, DEFAULT_UNIVERSE};
use crate::driver::{finish, local_summaries, Strategy};
use crate::error::{Error, Result};
use crate::eval::metrics::{score, MetricsReport};
use crate::eval::oracle::FrequencyTable;
use crate::eval::stats::{confidence_interval, CiSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Exp1,
    Exp2,
    Exp3,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Exp1 => "exp1",
            Preset::Exp2 => "exp2",
            Preset::Exp3 => "exp3",
        }
    }

    /// Full-scale `(n, k, rho)` grid.
    pub fn full_scale_cells(self) -> Vec<(u64, u64, f64)> {
        const M: u64 = 1_000_000;
        match self {
            Preset::Exp1 => (1..=10).map(|i| (500 * M, 1000 * i, 1.5)).collect(),
            Preset::Exp2 => (1..=10).map(|i| (100 * M * i, 2000, 1.5)).collect(),
            Preset::Exp3 => (1..=6).map(|i| (500 * M, 2000, 0.5 * i as f64)).collect(),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exp1" => Ok(Preset::Exp1),
            "exp2" => Ok(Preset::Exp2),
            "exp3" => Ok(Preset::Exp3),
            other => Err(format!("unknown preset {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaleConfig {
    pub n_divisor: u64,
    pub k_divisor: u64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        ScaleConfig {
            n_divisor: 100,
            k_divisor: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub cells: Vec<Cell>,
    pub family: Family,
    pub a: f64,
    pub universe: u64,
    pub seeds: Vec<u64>,
    pub p: usize,
    pub strategies: Vec<Strategy>,
}

impl ExperimentConfig {
    /// Scaled grid of `preset` with the default run setup: Zipf over a
    /// universe of 10^6 ranks, seeds 1..=20, 8 workers, both strategies.
    pub fn preset(preset: Preset, scale: ScaleConfig) -> Self {
        let cells = preset
            .full_scale_cells()
            .into_iter()
            .map(|(n, k, rho)| Cell {
                n: (n / scale.n_divisor.max(1)) as usize,
                k: (k / scale.k_divisor.max(1)).max(2) as usize,
                rho,
            })
            .collect();
        ExperimentConfig {
            preset,
            cells,
            family: Family::Zipf,
            a: DEFAULT_HURWITZ_SHIFT,
            universe: DEFAULT_UNIVERSE,
            seeds: (1..=20).collect(),
            p: 8,
            strategies: vec![Strategy::Paper, Strategy::Agarwal],
        }
    }

    pub fn total_runs(&self) -> usize {
        self.cells.len() * self.strategies.len() * self.seeds.len()
    }

    fn spec(&self, rho: f64, seed: u64) -> DistSpec {
        DistSpec {
            family: self.family,
            rho,
            a: if self.family == Family::Hurwitz { self.a } else { 0.0 },
            universe: self.universe,
            seed,
        }
    }

    /// The `a` column of the CSV outputs.
    fn reported_a(&self) -> f64 {
        match self.family {
            Family::Zipf => 0.0,
            Family::Hurwitz => self.a,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub cell: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub a: f64,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellAggregate {
    pub cell: usize,
    pub strategy: Strategy,
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub a: f64,
    pub runs: usize,
    pub total_error: Option<CiSummary>,
    /// Runs that reported nothing on a stream without frequent items carry no
    /// precision information and are left out; `None` when fewer than two
    /// runs remain.
    pub precision: Option<CiSummary>,
    pub recall: Option<CiSummary>,
    pub are: Option<CiSummary>,
    pub status: CellStatus,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<RunRecord>,
    pub cells: Vec<CellAggregate>,
}

impl ExperimentResult {
    pub fn cell(&self, cell: usize, strategy: Strategy) -> Option<&CellAggregate> {
        self.cells.iter().find(|c| c.cell == cell && c.strategy == strategy)
    }

    pub fn runs_for(&self, cell: usize, strategy: Strategy) -> impl Iterator<Item = &RunRecord> + '_ {
        self.runs
            .iter()
            .filter(move |r| r.cell == cell && r.strategy == strategy)
    }

    pub fn write_runs_csv<W: Write>(&self, writer: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            run_id: usize,
            strategy: &'static str,
            p: usize,
            n: usize,
            k: usize,
            rho: f64,
            a: f64,
            total_error: u64,
            precision: f64,
            recall: f64,
            are: f64,
        }
        let mut out = csv::Writer::from_writer(writer);
        for r in &self.runs {
            out.serialize(Row {
                run_id: r.run_id,
                strategy: r.strategy.name(),
                p: r.p,
                n: r.n,
                k: r.k,
                rho: r.rho,
                a: r.a,
                total_error: r.metrics.total_error,
                precision: r.metrics.precision,
                recall: r.metrics.recall,
                are: r.metrics.are,
            })?;
        }
        if self.runs.is_empty() {
            out.write_record(RUNS_HEADER)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_aggregate_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(AGGREGATE_HEADER)?;
        for c in &self.cells {
            let mut row = vec![
                c.strategy.name().to_string(),
                c.p.to_string(),
                c.n.to_string(),
                c.k.to_string(),
                c.rho.to_string(),
                c.a.to_string(),
                c.runs.to_string(),
            ];
            for ci in [&c.total_error, &c.precision, &c.recall, &c.are] {
                match ci {
                    Some(ci) => {
                        row.push(ci.mean.to_string());
                        row.push(ci.half_width.to_string());
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            row.push(match &c.status {
                CellStatus::Ok => "ok".to_string(),
                CellStatus::Failed(msg) => format!("failed: {msg}"),
            });
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub const RUNS_HEADER: [&str; 11] = [
    "run_id",
    "strategy",
    "p",
    "n",
    "k",
    "rho",
    "a",
    "total_error",
    "precision",
    "recall",
    "are",
];

pub const AGGREGATE_HEADER: [&str; 16] = [
    "strategy",
    "p",
    "n",
    "k",
    "rho",
    "a",
    "runs",
    "total_error_mean",
    "total_error_ci_half_width",
    "precision_mean",
    "precision_ci_half_width",
    "recall_mean",
    "recall_ci_half_width",
    "are_mean",
    "are_ci_half_width",
    "status",
];

/// Result of one (cell, seed): metrics per strategy, or the failure.
type SeedOutcome = Result<Vec<MetricsReport>, String>;

/// Runs every cell of `config` for every seed and strategy.
///
/// Streams are generated once per (rho, seed) at the largest `n` of that rho
/// and shared as prefixes; local summaries are shared by the strategies. Work
/// is spread over the current rayon pool; results do not depend on its size.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.seeds.len() < 2 {
        return Err(Error::TooFewSamples(config.seeds.len()));
    }
    if config.strategies.is_empty() || config.cells.is_empty() {
        return Ok(ExperimentResult::default());
    }

    // Group cells by skew; each group shares its streams.
    let mut rhos: Vec<f64> = Vec::new();
    for cell in &config.cells {
        if !rhos.contains(&cell.rho) {
            rhos.push(cell.rho);
        }
    }
    let dists: Vec<Result<Distribution, String>> = rhos
        .par_iter()
        .map(|&rho| Distribution::new(config.spec(rho, 0)).map_err(|e| e.to_string()))
        .collect();

    let units: Vec<(usize, usize)> = (0..rhos.len())
        .flat_map(|g| (0..config.seeds.len()).map(move |s| (g, s)))
        .collect();

    // outcomes[cell][seed]
    let mut outcomes: Vec<Vec<Option<SeedOutcome>>> = vec![vec![None; config.seeds.len()]; config.cells.len()];
    let computed: Vec<Vec<(usize, usize, SeedOutcome)>> = units
        .par_iter()
        .map(|&(group, seed_idx)| run_unit(config, rhos[group], &dists[group], seed_idx))
        .collect();
    for (cell, seed_idx, outcome) in computed.into_iter().flatten() {
        outcomes[cell][seed_idx] = Some(outcome);
    }

    let a = config.reported_a();
    let mut result = ExperimentResult::default();
    let mut run_id = 0;
    for (cell_idx, cell) in config.cells.iter().enumerate() {
        let per_seed: Vec<SeedOutcome> = outcomes[cell_idx]
            .iter_mut()
            .map(|o| o.take().expect("every unit reports every cell"))
            .collect();
        let failure = per_seed.iter().find_map(|o| o.as_ref().err().cloned());
        for (s_idx, &strategy) in config.strategies.iter().enumerate() {
            let base = CellAggregate {
                cell: cell_idx,
                strategy,
                p: config.p,
                n: cell.n,
                k: cell.k,
                rho: cell.rho,
                a,
                runs: 0,
                total_error: None,
                precision: None,
                recall: None,
                are: None,
                status: CellStatus::Ok,
            };
            if let Some(msg) = &failure {
                result.cells.push(CellAggregate {
                    status: CellStatus::Failed(msg.clone()),
                    ..base
                });
                continue;
            }
            let metrics: Vec<MetricsReport> = per_seed.iter().map(|o| o.as_ref().unwrap()[s_idx]).collect();
            for (seed_idx, m) in metrics.iter().enumerate() {
                result.runs.push(RunRecord {
                    run_id,
                    cell: cell_idx,
                    strategy,
                    seed: config.seeds[seed_idx],
                    p: config.p,
                    n: cell.n,
                    k: cell.k,
                    rho: cell.rho,
                    a,
                    metrics: *m,
                });
                run_id += 1;
            }
            result.cells.push(aggregate(base, &metrics));
        }
    }
    Ok(result)
}

fn aggregate(base: CellAggregate, metrics: &[MetricsReport]) -> CellAggregate {
    let ci = |values: Vec<f64>| confidence_interval(&values).ok();
    let precision = metrics
        .iter()
        .filter(|m| !(m.reported == 0 && m.true_frequent == 0))
        .map(|m| m.precision)
        .collect();
    CellAggregate {
        runs: metrics.len(),
        total_error: ci(metrics.iter().map(|m| m.total_error as f64).collect()),
        precision: ci(precision),
        recall: ci(metrics.iter().map(|m| m.recall).collect()),
        are: ci(metrics.iter().map(|m| m.are).collect()),
        ..base
    }
}

fn run_unit(
    config: &ExperimentConfig,
    rho: f64,
    dist: &Result<Distribution, String>,
    seed_idx: usize,
) -> Vec<(usize, usize, SeedOutcome)> {
    let mut cells: Vec<(usize, &Cell)> = config.cells.iter().enumerate().filter(|(_, c)| c.rho == rho).collect();
    let dist = match dist {
        Ok(d) => d,
        Err(msg) => return cells.iter().map(|&(i, _)| (i, seed_idx, Err(msg.clone()))).collect(),
    };
    // Ascending n lets the oracle grow incrementally along the shared stream.
    cells.sort_by_key(|&(i, c)| (c.n, i));
    let max_n = cells.iter().map(|(_, c)| c.n).max().unwrap_or(0);
    let stream = dist.sample_seeded(config.seeds[seed_idx], max_n);

    let mut table = FrequencyTable::new();
    let mut counted = 0;
    let mut out = Vec::with_capacity(cells.len());
    for (cell_idx, cell) in cells {
        table.extend(stream[counted..cell.n].iter().copied());
        counted = cell.n;
        let prefix = &stream[..cell.n];
        let outcome = (|| -> Result<Vec<MetricsReport>> {
            let locals = local_summaries(prefix, config.p, cell.k)?;
            config
                .strategies
                .iter()
                .map(|&strategy| {
                    let exec = finish(locals.clone(), cell.n as u64, strategy)?;
                    Ok(score(&exec.report, &table, cell.k))
                })
                .collect()
        })();
        out.push((cell_idx, seed_idx, outcome.map_err(|e| e.to_string())));
    }
    out
}
