use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use sha2::{Digest, Sha256};

use pss_core::eval::{run_experiment, Cell, ExperimentConfig, Preset, ScaleConfig};
use pss_core::io::{read_stream, write_stream, StreamFormat};
use pss_core::{
    exact_frequencies, run_parallel, sample_stream, score, FrequencyTable, FrequentReport, Item, Strategy, Summary,
};

use crate::{Classify, CmdResult, DistArgs, ExperimentArgs, FamilyArg, GenArgs, RunArgs, StrategyArg};

fn generate(dist: &DistArgs) -> CmdResult<(Vec<Item>, f64)> {
    let rho = dist
        .rho
        .ok_or_else(|| anyhow!("--rho is required to generate a stream"))
        .usage()?;
    let n = dist
        .n
        .ok_or_else(|| anyhow!("--n is required to generate a stream"))
        .usage()?;
    let stream = sample_stream(&dist.spec(rho), n).usage()?;
    Ok((stream, rho))
}

fn reported_a(dist: &DistArgs) -> f64 {
    match dist.family {
        FamilyArg::Zipf => 0.0,
        FamilyArg::Hurwitz => dist.a,
    }
}

pub fn manifest_path(stream: &Path) -> PathBuf {
    stream.with_extension("manifest.csv")
}

fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn gen(args: GenArgs) -> CmdResult {
    StreamFormat::from_path(&args.out).usage()?;
    let (stream, _) = generate(&args.dist)?;
    write_stream(&args.out, &stream)
        .with_context(|| format!("writing {}", args.out.display()))
        .internal()?;

    let manifest = manifest_path(&args.out);
    let file = File::create(&manifest)
        .with_context(|| format!("creating {}", manifest.display()))
        .internal()?;
    exact_frequencies(&stream)
        .write_manifest(BufWriter::new(file))
        .internal()?;

    let checksum = sha256_file(&args.out).internal()?;
    println!("stream: {}", args.out.display());
    println!("manifest: {}", manifest.display());
    println!("items: {}", stream.len());
    println!("sha256: {checksum}");
    Ok(())
}

pub fn run(args: RunArgs) -> CmdResult {
    if args.k < 2 {
        return Err(anyhow!("--k must be at least 2, got {}", args.k)).usage();
    }
    if args.p == 0 {
        return Err(anyhow!("--p must be at least 1")).usage();
    }
    if args.strategy == StrategyArg::Sequential && args.p != 1 {
        return Err(anyhow!("--strategy sequential runs on one worker; pass --p 1")).usage();
    }

    let (stream, rho) = match &args.input {
        Some(path) => {
            let stream = read_stream(path)
                .with_context(|| format!("reading {}", path.display()))
                .usage()?;
            (stream, None)
        }
        None => {
            let (stream, rho) = generate(&args.dist)?;
            (stream, Some(rho))
        }
    };
    if stream.is_empty() {
        return Err(anyhow!("the stream is empty")).usage();
    }
    if args.p > stream.len() {
        return Err(anyhow!("--p {} exceeds the stream length {}", args.p, stream.len())).usage();
    }

    let (name, report) = match args.strategy {
        StrategyArg::Sequential => {
            let summary = Summary::from_stream(args.k, &stream).internal()?;
            ("sequential", summary.prune(stream.len() as u64).internal()?)
        }
        StrategyArg::Paper => (
            "paper",
            run_parallel(&stream, args.p, args.k, Strategy::Paper).internal()?,
        ),
        StrategyArg::Agarwal => (
            "agarwal",
            run_parallel(&stream, args.p, args.k, Strategy::Agarwal).internal()?,
        ),
    };
    print_report(&report).internal()?;

    let oracle = match &args.oracle {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("opening {}", path.display()))
                .usage()?;
            let table = FrequencyTable::read_manifest(file)
                .with_context(|| format!("reading {}", path.display()))
                .usage()?;
            if table.total() != stream.len() as u64 {
                return Err(anyhow!(
                    "manifest counts {} items but the stream has {}",
                    table.total(),
                    stream.len()
                ))
                .usage();
            }
            table
        }
        None => exact_frequencies(&stream),
    };
    let metrics = score(&report, &oracle, args.k);
    eprintln!(
        "n={} k={} p={} strategy={} threshold={} reported={} total_error={} precision={} recall={} are={}",
        stream.len(),
        args.k,
        args.p,
        name,
        report.threshold,
        metrics.reported,
        metrics.total_error,
        metrics.precision,
        metrics.recall,
        metrics.are
    );

    if let Some(out) = &args.out {
        let write = || -> anyhow::Result<()> {
            let mut w = csv::Writer::from_path(out)?;
            w.write_record(pss_core::eval::experiment::RUNS_HEADER)?;
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            let a = rho.map(|_| reported_a(&args.dist));
            w.write_record([
                "0".to_string(),
                name.to_string(),
                args.p.to_string(),
                stream.len().to_string(),
                args.k.to_string(),
                opt(rho),
                opt(a),
                metrics.total_error.to_string(),
                metrics.precision.to_string(),
                metrics.recall.to_string(),
                metrics.are.to_string(),
            ])?;
            w.flush()?;
            Ok(())
        };
        write()
            .with_context(|| format!("writing {}", out.display()))
            .internal()?;
    }
    Ok(())
}

fn print_report(report: &FrequentReport) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    writeln!(out, "item,est_freq,err,guaranteed")?;
    for e in &report.entries {
        writeln!(out, "{},{},{},{}", e.item, e.est_freq, e.err, e.guaranteed)?;
    }
    out.flush()
}

fn distinct<T: PartialEq + Copy>(values: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn experiment_config(args: &ExperimentArgs) -> anyhow::Result<ExperimentConfig> {
    let preset: Preset = args.preset.parse().map_err(|e: String| anyhow!(e))?;
    if args.scale == 0 || args.k_scale == 0 {
        bail!("--scale and --k-scale must be positive");
    }
    if args.p == 0 {
        bail!("--p must be at least 1");
    }
    if args.seeds < 2 {
        bail!("--seeds must be at least 2 for confidence intervals");
    }
    let scale = ScaleConfig {
        n_divisor: args.scale,
        k_divisor: args.k_scale,
    };
    let mut config = ExperimentConfig::preset(preset, scale);
    config.family = args.family.into();
    config.a = args.a;
    config.universe = args.universe;
    config.p = args.p;
    config.seeds = (args.seed_base..args.seed_base + args.seeds).collect();
    config.strategies = args
        .strategies
        .iter()
        .map(|s| s.parse::<Strategy>().map_err(|e| anyhow!(e)))
        .collect::<anyhow::Result<_>>()?;
    config.strategies = distinct(config.strategies);

    if !(args.ns.is_empty() && args.ks.is_empty() && args.rhos.is_empty()) {
        let pick = |given: &[usize], default: Vec<usize>| if given.is_empty() { default } else { given.to_vec() };
        let ns = pick(&args.ns, distinct(config.cells.iter().map(|c| c.n)));
        let ks = pick(&args.ks, distinct(config.cells.iter().map(|c| c.k)));
        let rhos = if args.rhos.is_empty() {
            distinct(config.cells.iter().map(|c| c.rho))
        } else {
            args.rhos.clone()
        };
        config.cells.clear();
        for &n in &ns {
            for &k in &ks {
                for &rho in &rhos {
                    config.cells.push(Cell { n, k, rho });
                }
            }
        }
    }
    for cell in &config.cells {
        if cell.k < 2 {
            bail!("k = {} is below 2; lower --k-scale", cell.k);
        }
        if cell.n < config.p {
            bail!("n = {} is shorter than p = {}; lower --scale", cell.n, config.p);
        }
    }
    Ok(config)
}

pub fn experiment(args: ExperimentArgs) -> CmdResult {
    let config = experiment_config(&args).usage()?;
    let preset = config.preset.name();
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .usage()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = pool.build().internal()?;
    eprintln!(
        "{preset}: {} cells x {} strategies x {} seeds on {} threads",
        config.cells.len(),
        config.strategies.len(),
        config.seeds.len(),
        pool.current_num_threads()
    );
    let result = pool.install(|| run_experiment(&config)).usage()?;

    let runs_path = args.out_dir.join(format!("{preset}_runs.csv"));
    let aggregate_path = args.out_dir.join(format!("{preset}_aggregate.csv"));
    let create = |path: &Path| {
        File::create(path)
            .map(BufWriter::new)
            .with_context(|| format!("creating {}", path.display()))
    };
    result.write_runs_csv(create(&runs_path).internal()?).internal()?;
    result
        .write_aggregate_csv(create(&aggregate_path).internal()?)
        .internal()?;

    let failed = result
        .cells
        .iter()
        .filter(|c| c.status != pss_core::eval::CellStatus::Ok)
        .count();
    println!("runs: {}", result.runs.len());
    println!("runs_csv: {}", runs_path.display());
    println!("aggregate_csv: {}", aggregate_path.display());
    if failed > 0 {
        eprintln!("{failed} cell(s) failed; see the status column");
    }
    Ok(())
}
