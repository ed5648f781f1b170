//! `pss`: generate streams, run the frequent-items pipeline, replay the
//! synthetic experiments.
//!
//! Exit status is 0 on success, 2 for bad arguments or unreadable input and
//! 1 for internal failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pss_core::datagen::{DEFAULT_HURWITZ_SHIFT, DEFAULT_UNIVERSE};
use pss_core::{DistSpec, Family};

#[derive(Parser, Debug)]
#[command(name = "pss", version, about = "Parallel Space Saving frequent items")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a Zipf or Hurwitz stream and write it with its exact-count manifest.
    Gen(GenArgs),
    /// Find the frequent items of a stream.
    Run(RunArgs),
    /// Replay a preset error experiment and write per-run and aggregate CSVs.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Zipf,
    Hurwitz,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Zipf => Family::Zipf,
            FamilyArg::Hurwitz => Family::Hurwitz,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct DistArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Zipf)]
    family: FamilyArg,
    /// Skew; rank x has weight x^-(rho+1).
    #[arg(long)]
    rho: Option<f64>,
    /// Hurwitz shift.
    #[arg(long, default_value_t = DEFAULT_HURWITZ_SHIFT)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE)]
    universe: u64,
    /// Stream length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl DistArgs {
    fn spec(&self, rho: f64) -> DistSpec {
        match self.family {
            FamilyArg::Zipf => DistSpec::zipf(rho, self.universe, self.seed),
            FamilyArg::Hurwitz => DistSpec::hurwitz(rho, self.a, self.universe, self.seed),
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    dist: DistArgs,
    /// Output stream, `.u32` (raw little-endian) or `.txt` (one item per
    /// line). The manifest goes next to it as `<stem>.manifest.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Paper,
    Agarwal,
    /// Plain Space Saving over the whole stream; needs `--p 1`.
    Sequential,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Stream file (`.u32` or `.txt`). Without it the stream is generated
    /// from the distribution flags.
    #[arg(long, conflicts_with = "rho")]
    input: Option<PathBuf>,
    #[command(flatten)]
    dist: DistArgs,
    /// Counters per summary.
    #[arg(long)]
    k: usize,
    /// Workers.
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Paper)]
    strategy: StrategyArg,
    /// Exact-count manifest to score against. Without it the stream itself
    /// is counted.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Write a one-row metrics CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// exp1 (varying k), exp2 (varying n) or exp3 (varying rho).
    #[arg(long)]
    preset: String,
    /// Divisor applied to the full-scale stream lengths.
    #[arg(long, env = "SS_DEFAULT_SCALE", default_value_t = 100)]
    scale: u64,
    /// Divisor applied to the full-scale k values.
    #[arg(long, default_value_t = 10)]
    k_scale: u64,
    #[arg(long, value_delimiter = ',', default_values_t = vec!["paper".to_string(), "agarwal".to_string()])]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 8)]
    p: usize,
    /// Number of seeds; seeds run from `--seed-base` upwards.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 1)]
    seed_base: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Zipf)]
    family: FamilyArg,
    #[arg(long, default_value_t = DEFAULT_HURWITZ_SHIFT)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE)]
    universe: u64,
    /// Replace the grid's stream lengths.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    /// Replace the grid's k values.
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    /// Replace the grid's skews.
    #[arg(long, value_delimiter = ',')]
    rhos: Vec<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for the experiment; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

/// A failure and the exit status it maps to.
enum Failure {
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

type CmdResult<T = ()> = Result<T, Failure>;

trait Classify<T> {
    fn usage(self) -> CmdResult<T>;
    fn internal(self) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn internal(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Run(args) => commands::run(args),
        Command::Experiment(args) => commands::experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}
