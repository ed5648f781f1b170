//! The parallel pipeline: block decomposition, local Space Saving on each
//! worker, a binary-tree reduction of the local summaries and the final
//! report at rank 0.
//!
//! Workers run as scoped threads and exchange summaries only as encoded
//! bytes over channels, one channel per edge of the [`ReductionPlan`]. The
//! same plan can be replayed on a single thread with [`simulate`]; both paths
//! merge in the same order and produce identical summaries.

use std::sync::mpsc;
use std::thread;

use crate::error::{Error, Result};
use crate::merge::{agarwal_merge_step, agarwal_normalize, merge_step};
use crate::summary::{FrequentReport, Item, Summary};
use crate::wire;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Combine with minimum padding, truncate to `k`, prune at the root.
    Paper,
    /// Normalize to Frequent summaries and merge with the Frequent rule.
    Agarwal,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Paper => "paper",
            Strategy::Agarwal => "agarwal",
        }
    }

    fn prepare(self, local: Summary) -> Summary {
        match self {
            Strategy::Paper => local,
            Strategy::Agarwal => agarwal_normalize(&local),
        }
    }

    /// The reduction operator for this strategy.
    pub fn merge(self, s1: &Summary, s2: &Summary) -> Result<Summary> {
        match self {
            Strategy::Paper => merge_step(s1, s2).map(|(s, _)| s),
            Strategy::Agarwal => agarwal_merge_step(s1, s2),
        }
    }

    fn report(self, global: &Summary, n: u64) -> Result<FrequentReport> {
        match self {
            Strategy::Paper => global.prune(n),
            // Frequent-style estimates are lower bounds, so the root returns
            // the whole candidate set instead of thresholding it.
            Strategy::Agarwal => Ok(FrequentReport::unfiltered(global)),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Strategy::Paper),
            "agarwal" => Ok(Strategy::Agarwal),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Inclusive index range of the stream handled by one worker. `right` is
/// `left - 1` only for an empty stream, which callers never construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockAssignment {
    pub rank: usize,
    pub left: usize,
    pub right: usize,
}

impl BlockAssignment {
    pub fn len(&self) -> usize {
        self.right + 1 - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.left..self.right + 1
    }
}

/// Block distribution: every worker gets `floor(n/p)` or `ceil(n/p)`
/// consecutive indices.
pub fn block_bounds(rank: usize, p: usize, n: usize) -> Result<BlockAssignment> {
    if p == 0 || p > n {
        return Err(Error::InvalidWorkerCount { p, n });
    }
    if rank >= p {
        return Err(Error::RankOutOfRange { rank, p });
    }
    let (n128, p128) = (n as u128, p as u128);
    let left = (rank as u128 * n128 / p128) as usize;
    let right = ((rank as u128 + 1) * n128 / p128) as usize - 1;
    Ok(BlockAssignment { rank, left, right })
}

/// Pairing of the binary-tree reduction. In round `r` (1-based) every rank
/// `i` with `i % 2^r == 0` receives from `i + 2^(r-1)` when that rank exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPlan {
    p: usize,
    rounds: Vec<Vec<(usize, usize)>>,
}

impl ReductionPlan {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::EmptyReduction);
        }
        let mut rounds = Vec::new();
        let mut stride = 1;
        while stride < p {
            let pairs = (0..p)
                .step_by(2 * stride)
                .filter(|&recv| recv + stride < p)
                .map(|recv| (recv, recv + stride))
                .collect();
            rounds.push(pairs);
            stride *= 2;
        }
        Ok(ReductionPlan { p, rounds })
    }

    pub fn workers(&self) -> usize {
        self.p
    }

    /// `(receiver, sender)` pairs per round.
    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }

    fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.rounds
            .iter()
            .enumerate()
            .flat_map(|(r, pairs)| pairs.iter().map(move |&(recv, send)| (r, recv, send)))
    }
}

/// Data moved through a reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Traffic {
    pub messages: usize,
    pub counters: usize,
    pub bytes: usize,
}

impl Traffic {
    fn record(&mut self, shipped: &Summary) {
        self.messages += 1;
        self.counters += shipped.len();
        self.bytes += wire::encoded_len(shipped.len());
    }
}

/// Replays the reduction tree on the calling thread.
pub fn reduce_tree<F>(summaries: Vec<Summary>, step: F) -> Result<Summary>
where
    F: Fn(&Summary, &Summary) -> Result<Summary>,
{
    reduce_tree_traced(summaries, step).map(|(s, _)| s)
}

/// [`reduce_tree`] that also reports how many counters were shipped.
pub fn reduce_tree_traced<F>(summaries: Vec<Summary>, step: F) -> Result<(Summary, Traffic)>
where
    F: Fn(&Summary, &Summary) -> Result<Summary>,
{
    let plan = ReductionPlan::new(summaries.len())?;
    let mut slots: Vec<Option<Summary>> = summaries.into_iter().map(Some).collect();
    let mut traffic = Traffic::default();
    for pairs in plan.rounds() {
        for &(recv, send) in pairs {
            let incoming = slots[send].take().expect("sender already retired");
            traffic.record(&incoming);
            let own = slots[recv].take().expect("receiver already retired");
            slots[recv] = Some(step(&own, &incoming)?);
        }
    }
    Ok((slots[0].take().expect("rank 0 holds the result"), traffic))
}

/// Everything a pipeline run produces at rank 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub report: FrequentReport,
    pub global: Summary,
    pub traffic: Traffic,
}

fn check_run(stream: &[Item], p: usize, k: usize) -> Result<()> {
    crate::summary::check_capacity(k)?;
    if p == 0 || p > stream.len() {
        return Err(Error::InvalidWorkerCount { p, n: stream.len() });
    }
    Ok(())
}

/// Local Space Saving summary of every worker's block.
pub fn local_summaries(stream: &[Item], p: usize, k: usize) -> Result<Vec<Summary>> {
    check_run(stream, p, k)?;
    (0..p)
        .map(|rank| {
            let block = block_bounds(rank, p, stream.len())?;
            Summary::from_stream(k, &stream[block.range()])
        })
        .collect()
}

/// Reduces precomputed local summaries on one thread and builds the report
/// for a stream of length `n`.
///
/// With a single worker nothing is merged and both strategies return the
/// pruned sequential summary.
pub fn finish(locals: Vec<Summary>, n: u64, strategy: Strategy) -> Result<Execution> {
    if locals.len() == 1 {
        let global = locals.into_iter().next().unwrap();
        return Ok(Execution {
            report: global.prune(n)?,
            global,
            traffic: Traffic::default(),
        });
    }
    let prepared = locals.into_iter().map(|s| strategy.prepare(s)).collect();
    let (global, traffic) = reduce_tree_traced(prepared, |a, b| strategy.merge(a, b))?;
    Ok(Execution {
        report: strategy.report(&global, n)?,
        global,
        traffic,
    })
}

/// Single-threaded run of the whole pipeline.
pub fn simulate(stream: &[Item], p: usize, k: usize, strategy: Strategy) -> Result<Execution> {
    let locals = local_summaries(stream, p, k)?;
    finish(locals, stream.len() as u64, strategy)
}

/// Runs the pipeline with one thread per worker and returns rank 0's report.
pub fn run_parallel(stream: &[Item], p: usize, k: usize, strategy: Strategy) -> Result<FrequentReport> {
    run_parallel_detailed(stream, p, k, strategy).map(|e| e.report)
}

/// [`run_parallel`] returning the global summary and traffic as well.
pub fn run_parallel_detailed(stream: &[Item], p: usize, k: usize, strategy: Strategy) -> Result<Execution> {
    check_run(stream, p, k)?;
    let n = stream.len();
    if p == 1 {
        return finish(vec![Summary::from_stream(k, stream)?], n as u64, strategy);
    }
    let plan = ReductionPlan::new(p)?;

    // One channel per tree edge; a worker owns the receiving ends of the
    // edges where it is the receiver and the sending end of its single
    // outgoing edge.
    let mut inboxes: Vec<Vec<(usize, mpsc::Receiver<Vec<u8>>)>> = (0..p).map(|_| Vec::new()).collect();
    let mut outboxes: Vec<Option<mpsc::Sender<Vec<u8>>>> = (0..p).map(|_| None).collect();
    for (_, recv, send) in plan.edges() {
        let (tx, rx) = mpsc::channel();
        inboxes[recv].push((send, rx));
        outboxes[send] = Some(tx);
    }

    let results: Vec<Result<(Option<Summary>, Traffic)>> = thread::scope(|scope| {
        let handles: Vec<_> = inboxes
            .into_iter()
            .zip(outboxes)
            .enumerate()
            .map(|(rank, (inbox, outbox))| {
                scope.spawn(move || -> Result<(Option<Summary>, Traffic)> {
                    let block = block_bounds(rank, p, n)?;
                    let local = Summary::from_stream(k, &stream[block.range()])?;
                    let mut acc = strategy.prepare(local);
                    for (sender, rx) in inbox {
                        let bytes = rx.recv().map_err(|_| Error::Worker(sender))?;
                        let incoming = wire::decode(&bytes)?;
                        acc = strategy.merge(&acc, &incoming)?;
                    }
                    let mut traffic = Traffic::default();
                    match outbox {
                        Some(tx) => {
                            traffic.record(&acc);
                            tx.send(wire::encode(&acc)).map_err(|_| Error::Worker(rank))?;
                            Ok((None, traffic))
                        }
                        None => Ok((Some(acc), traffic)),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(rank, h)| h.join().unwrap_or(Err(Error::Worker(rank))))
            .collect()
    });

    let mut traffic = Traffic::default();
    let mut global = None;
    for result in results {
        let (summary, t) = result?;
        traffic.messages += t.messages;
        traffic.counters += t.counters;
        traffic.bytes += t.bytes;
        if summary.is_some() {
            global = summary;
        }
    }
    let global = global.ok_or(Error::Worker(0))?;
    Ok(Execution {
        report: strategy.report(&global, n as u64)?,
        global,
        traffic,
    })
}
