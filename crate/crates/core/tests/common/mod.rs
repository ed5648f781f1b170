//! Brute-force references shared by the integration and acceptance tests.
//!
//! Nothing here calls into the summary code under test except to read its
//! counters; exact counts and the reference Space Saving are recomputed from
//! scratch.

#![allow(dead_code)]

use std::collections::BTreeMap;

use pss_core::{CombinedSummary, Counter, Item, MergeStats, Summary};
use rand::Rng;

pub type Exact = BTreeMap<u32, u64>;

pub fn exact(stream: &[Item]) -> Exact {
    let mut out = Exact::new();
    for x in stream {
        *out.entry(x.0).or_insert(0) += 1;
    }
    out
}

/// Items with exact frequency at least `floor(n/k) + 1`.
pub fn frequent(truth: &Exact, n: u64, k: usize) -> Vec<u32> {
    let threshold = n / k as u64 + 1;
    truth.iter().filter(|(_, &f)| f >= threshold).map(|(&x, _)| x).collect()
}

/// Space Saving over a plain vector with linear scans. Eviction replaces the
/// counter with the smallest `(count, item)`.
pub struct NaiveSpaceSaving {
    k: usize,
    counters: Vec<(u32, u64, u64)>,
}

impl NaiveSpaceSaving {
    pub fn new(k: usize) -> Self {
        NaiveSpaceSaving {
            k,
            counters: Vec::new(),
        }
    }

    pub fn update(&mut self, x: u32) {
        if let Some(c) = self.counters.iter_mut().find(|c| c.0 == x) {
            c.1 += 1;
            return;
        }
        if self.counters.len() < self.k {
            self.counters.push((x, 1, 0));
            return;
        }
        let victim = (0..self.counters.len())
            .min_by_key(|&i| (self.counters[i].1, self.counters[i].0))
            .unwrap();
        let m = self.counters[victim].1;
        self.counters[victim] = (x, m + 1, m);
    }

    /// Counters ascending by `(count, item)`.
    pub fn counters(&self) -> Vec<Counter> {
        let mut out: Vec<Counter> = self.counters.iter().map(|&(x, f, e)| Counter::new(x, f, e)).collect();
        out.sort_by_key(|c| (c.est_freq, c.item));
        out
    }
}

pub fn naive(stream: &[Item], k: usize) -> Vec<Counter> {
    let mut s = NaiveSpaceSaving::new(k);
    for x in stream {
        s.update(x.0);
    }
    s.counters()
}

/// A stream of length `n` over `0..universe`; `skew` >= 1 concentrates mass
/// on small values.
pub fn random_stream<R: Rng>(rng: &mut R, n: usize, universe: u32, skew: f64) -> Vec<Item> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            Item(((u.powf(skew) * universe as f64) as u32).min(universe - 1))
        })
        .collect()
}

/// A random stream with random length in `1..=max_n`, universe in
/// `1..=max_universe` and random skew.
pub fn any_stream<R: Rng>(rng: &mut R, max_n: usize, max_universe: u32) -> Vec<Item> {
    let n = rng.random_range(1..=max_n);
    let universe = rng.random_range(1..=max_universe);
    let skew = rng.random_range(1.0..6.0);
    random_stream(rng, n, universe, skew)
}

/// Violations of the Space Saving relations for `s` against the exact
/// counts of a stream of length `n`.
///
/// * monitored: `est - min <= est - err <= f <= est`
/// * unmonitored: `f <= min`
/// * `min <= floor(n/k)`
/// * with `exact_total`, the counters sum to `n`.
pub fn space_saving_violations(s: &Summary, truth: &Exact, n: u64, exact_total: bool) -> Vec<String> {
    let mut out = Vec::new();
    let min = s.min_frequency();
    if exact_total && s.total() != n {
        out.push(format!("counters sum to {} but n = {n}", s.total()));
    }
    for c in s.counters() {
        let f = truth.get(&c.item.0).copied().unwrap_or(0);
        let lower = c.est_freq.checked_sub(c.err);
        match lower {
            None => out.push(format!("{}: err {} exceeds est {}", c.item, c.err, c.est_freq)),
            Some(lower) => {
                if c.est_freq.saturating_sub(min) > lower {
                    out.push(format!("{}: err {} exceeds min {min}", c.item, c.err));
                }
                if lower > f {
                    out.push(format!("{}: est - err = {lower} > f = {f}", c.item));
                }
            }
        }
        if f > c.est_freq {
            out.push(format!("{}: f = {f} > est {}", c.item, c.est_freq));
        }
    }
    for (&x, &f) in truth {
        if !s.contains(Item(x)) && f > min {
            out.push(format!("unmonitored {x}: f = {f} > min {min}"));
        }
    }
    if min > n / s.capacity() as u64 {
        out.push(format!("min {min} > floor(n/k) = {}", n / s.capacity() as u64));
    }
    out
}

/// Violations of the combine identity and the combined-summary bounds.
pub fn combine_violations(
    s1: &Summary,
    s2: &Summary,
    combined: &CombinedSummary,
    stats: &MergeStats,
    truth: &Exact,
) -> Vec<String> {
    let mut out = Vec::new();
    let delta = stats.delta;
    let k = s1.capacity() as i64;
    let x = combined.len() as i64 - k;
    if stats.x != x || delta != s1.min_frequency() + s2.min_frequency() {
        out.push(format!("stats {stats:?} disagree with x = {x}"));
    }
    let expected = s1.total() as i128 + s2.total() as i128 + x as i128 * delta as i128;
    if combined.total() as i128 != expected {
        out.push(format!(
            "|S_C| = {} but |S1| + |S2| + x*delta = {expected}",
            combined.total()
        ));
    }
    if combined.len() > 2 * s1.capacity() {
        out.push(format!("combined holds {} > 2k counters", combined.len()));
    }
    if combined.counters().windows(2).any(|w| w[0].key() >= w[1].key()) {
        out.push("combined counters not strictly ascending".into());
    }
    for c in combined.counters() {
        let f = truth.get(&c.item.0).copied().unwrap_or(0);
        if c.err > delta || c.err > c.est_freq || c.est_freq - c.err > f || f > c.est_freq {
            out.push(format!("combined {c:?}: f = {f}, delta = {delta}"));
        }
    }
    for (&x, &f) in truth {
        if !combined.counters().iter().any(|c| c.item.0 == x) && f > delta {
            out.push(format!("outside combined {x}: f = {f} > delta {delta}"));
        }
    }
    out
}

/// Violations of the single merge-step guarantees for `merged`.
pub fn merge_violations(merged: &Summary, stats: &MergeStats, truth: &Exact, n: u64) -> Vec<String> {
    let mut out = Vec::new();
    let k = merged.capacity() as u64;
    let min = merged.min_frequency();
    if merged.total() > n {
        out.push(format!("|S_M| = {} > |N| = {n}", merged.total()));
    }
    if stats.delta > min {
        out.push(format!("delta {} > min {min}", stats.delta));
    }
    if min * k > merged.total() {
        out.push(format!("min {min} > |S_M|/k = {}/{k}", merged.total()));
    }
    if stats.x > 0 && stats.discarded_mass < stats.x as u64 * stats.delta {
        out.push(format!("discarded {} < x*delta", stats.discarded_mass));
    }
    out.extend(space_saving_violations(merged, truth, n, false));
    out
}
