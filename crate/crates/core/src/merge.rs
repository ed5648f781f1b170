//! Pairwise merging of Space Saving summaries.
//!
//! Two strategies are provided:
//!
//! * [`merge_step`]: combine both summaries, charging each unshared item the
//!   other side's minimum frequency, then keep the `k` heaviest counters. The
//!   result is again a Space Saving summary of the concatenated streams, with
//!   the usual over-estimation guarantees.
//! * [`agarwal_normalize`] + [`agarwal_merge_step`]: the baseline that first
//!   turns each summary into a Frequent (Misra-Gries) style summary by
//!   subtracting its minimum, then merges with the Frequent pruning rule. Its
//!   frequencies are under-estimates and its errors carry no guarantee.

use crate::error::{Error, Result};
use crate::summary::{sort_counters, Counter, Summary};

/// Output of [`combine`]: up to `2k` counters, ascending by `(est_freq, item)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedSummary {
    k: usize,
    counters: Vec<Counter>,
}

impl CombinedSummary {
    pub fn capacity(&self) -> usize {
        self.k
    }

    pub fn counters(&self) -> &[Counter] {
        &self.counters
    }

    pub fn len(&self) -> usize {
        self.counters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counters.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counters.iter().map(|c| c.est_freq).sum()
    }
}

/// Bookkeeping of a single [`merge_step`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub m1: u64,
    pub m2: u64,
    /// `m1 + m2`, the error bound the merge adds.
    pub delta: u64,
    /// Combined item count minus `k`; negative when the combination fits.
    pub x: i64,
    /// Frequency mass of the counters truncated away.
    pub discarded_mass: u64,
}

fn same_capacity(s1: &Summary, s2: &Summary) -> Result<usize> {
    if s1.capacity() != s2.capacity() {
        return Err(Error::CapacityMismatch {
            left: s1.capacity(),
            right: s2.capacity(),
        });
    }
    Ok(s1.capacity())
}

/// Combines two summaries.
///
/// Shared items add their frequencies and errors. An item present on one side
/// only gets the other side's minimum added to both its frequency and error.
/// `m1`/`m2` are expected to be the inputs' [`Summary::min_frequency`].
pub fn combine(s1: &Summary, s2: &Summary, m1: u64, m2: u64) -> Result<CombinedSummary> {
    let k = same_capacity(s1, s2)?;
    debug_assert_eq!(m1, s1.min_frequency());
    debug_assert_eq!(m2, s2.min_frequency());

    let mut counters = Vec::with_capacity(s1.len() + s2.len());
    for c in s1.iter_unordered() {
        let merged = match s2.get(c.item) {
            Some(other) => Counter::new(c.item, c.est_freq + other.est_freq, c.err + other.err),
            None => Counter::new(c.item, c.est_freq + m2, c.err + m2),
        };
        counters.push(merged);
    }
    for c in s2.iter_unordered().filter(|c| !s1.contains(c.item)) {
        counters.push(Counter::new(c.item, c.est_freq + m1, c.err + m1));
    }
    sort_counters(&mut counters);
    Ok(CombinedSummary { k, counters })
}

/// One reduction step: combine, then keep the `k` counters with the largest
/// frequencies.
pub fn merge_step(s1: &Summary, s2: &Summary) -> Result<(Summary, MergeStats)> {
    let m1 = s1.min_frequency();
    let m2 = s2.min_frequency();
    let combined = combine(s1, s2, m1, m2)?;
    let k = combined.k;
    let nz = combined.counters.len();

    let mut stats = MergeStats {
        m1,
        m2,
        delta: m1 + m2,
        x: nz as i64 - k as i64,
        discarded_mass: 0,
    };
    let mut counters = combined.counters;
    if nz > k {
        let excess = nz - k;
        stats.discarded_mass = counters[..excess].iter().map(|c| c.est_freq).sum();
        counters.drain(..excess);
    }
    Ok((Summary::from_counters(k, counters)?, stats))
}

/// Subtracts the minimum from every counter of a full summary and drops the
/// counters that reach zero. Errors are left untouched. Summaries that are
/// not full are returned as they are.
pub fn agarwal_normalize(s: &Summary) -> Summary {
    if !s.is_full() {
        return s.clone();
    }
    let m = s.min_frequency();
    let counters = s
        .iter_unordered()
        .filter(|c| c.est_freq > m)
        .map(|c| Counter::new(c.item, c.est_freq - m, c.err));
    Summary::from_counters(s.capacity(), counters).expect("subset of a valid summary")
}

/// Merges two normalized summaries with the Frequent pruning rule, keeping at
/// most `k - 1` counters.
pub fn agarwal_merge_step(s1: &Summary, s2: &Summary) -> Result<Summary> {
    let k = same_capacity(s1, s2)?;

    let mut counters = Vec::with_capacity(s1.len() + s2.len());
    for c in s1.iter_unordered() {
        counters.push(match s2.get(c.item) {
            Some(other) => Counter::new(c.item, c.est_freq + other.est_freq, c.err + other.err),
            None => *c,
        });
    }
    counters.extend(s2.iter_unordered().filter(|c| !s1.contains(c.item)).copied());
    sort_counters(&mut counters);

    if counters.len() > k - 1 {
        let excess = counters.len() - (k - 1);
        let cut = counters[excess - 1].est_freq;
        counters.drain(..excess);
        for c in &mut counters {
            c.est_freq -= cut;
        }
        counters.retain(|c| c.est_freq > 0);
    }
    Summary::from_counters(k, counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summary::Item;

    const A: u32 = 1;
    const B: u32 = 2;
    const C: u32 = 3;
    const D: u32 = 4;

    fn c(item: u32, f: u64, e: u64) -> Counter {
        Counter::new(item, f, e)
    }

    fn summary(k: usize, counters: &[Counter]) -> Summary {
        Summary::from_counters(k, counters.iter().copied()).unwrap()
    }

    #[test]
    fn combine_shared_branch() {
        let s1 = summary(3, &[c(A, 5, 1)]);
        let s2 = summary(3, &[c(A, 3, 0)]);
        let out = combine(&s1, &s2, 0, 0).unwrap();
        assert_eq!(out.counters(), &[c(A, 8, 1)]);
    }

    #[test]
    fn combine_disjoint_branches() {
        let s1 = summary(2, &[c(A, 4, 0), c(B, 6, 1)]);
        let s2 = summary(2, &[c(C, 3, 0), c(D, 5, 2)]);
        let out = combine(&s1, &s2, s1.min_frequency(), s2.min_frequency()).unwrap();
        assert_eq!(out.counters(), &[c(A, 7, 3), c(C, 7, 4), c(B, 9, 4), c(D, 9, 6)]);
        assert_eq!(out.total(), 32);
    }

    #[test]
    fn combine_with_empty_is_identity() {
        let s1 = summary(2, &[c(A, 4, 0), c(B, 6, 1)]);
        let empty = Summary::new(2).unwrap();
        let out = combine(&s1, &empty, 4, 0).unwrap();
        assert_eq!(out.counters(), s1.counters().as_slice());
    }

    #[test]
    fn combine_rejects_mismatched_capacity() {
        let s1 = Summary::new(2).unwrap();
        let s2 = Summary::new(3).unwrap();
        assert!(matches!(
            combine(&s1, &s2, 0, 0),
            Err(Error::CapacityMismatch { left: 2, right: 3 })
        ));
        assert!(merge_step(&s1, &s2).is_err());
        assert!(agarwal_merge_step(&s1, &s2).is_err());
    }

    #[test]
    fn merge_step_truncates_lowest() {
        let s1 = summary(2, &[c(A, 4, 0), c(B, 6, 1)]);
        let s2 = summary(2, &[c(C, 3, 0), c(D, 5, 2)]);
        let (merged, stats) = merge_step(&s1, &s2).unwrap();
        assert_eq!(merged.counters(), vec![c(B, 9, 4), c(D, 9, 6)]);
        assert_eq!(
            stats,
            MergeStats {
                m1: 4,
                m2: 3,
                delta: 7,
                x: 2,
                discarded_mass: 14
            }
        );
        // |S_C| = |S1| + |S2| + x * delta
        assert_eq!(32, s1.total() + s2.total() + stats.x as u64 * stats.delta);
    }

    #[test]
    fn merge_step_with_empty() {
        let s1 = summary(2, &[c(A, 4, 0), c(B, 6, 1)]);
        let empty = Summary::new(2).unwrap();
        let (merged, stats) = merge_step(&s1, &empty).unwrap();
        assert_eq!(merged, s1);
        assert!(stats.x <= 0);
        assert_eq!(stats.discarded_mass, 0);
    }

    #[test]
    fn normalize_cases() {
        let partial = summary(3, &[c(A, 4, 0), c(B, 6, 1)]);
        assert_eq!(agarwal_normalize(&partial), partial);

        let full = summary(2, &[c(A, 4, 0), c(B, 6, 1)]);
        assert_eq!(agarwal_normalize(&full).counters(), vec![c(B, 2, 1)]);

        let flat = summary(3, &[c(A, 5, 0), c(B, 5, 1), c(C, 5, 2)]);
        assert!(agarwal_normalize(&flat).is_empty());
    }

    #[test]
    fn agarwal_merge_under_capacity() {
        let s1 = summary(4, &[c(A, 2, 0)]);
        let s2 = summary(4, &[c(B, 3, 0)]);
        let out = agarwal_merge_step(&s1, &s2).unwrap();
        assert_eq!(out.counters(), vec![c(A, 2, 0), c(B, 3, 0)]);
    }

    #[test]
    fn agarwal_merge_prunes_to_k_minus_one() {
        let s1 = summary(2, &[c(A, 2, 0)]);
        let s2 = summary(2, &[c(B, 3, 0)]);
        let out = agarwal_merge_step(&s1, &s2).unwrap();
        assert_eq!(out.counters(), vec![c(B, 1, 0)]);
    }

    #[test]
    fn agarwal_merge_shared_item() {
        let s1 = summary(2, &[c(A, 2, 0)]);
        let s2 = summary(2, &[c(A, 5, 1)]);
        let out = agarwal_merge_step(&s1, &s2).unwrap();
        assert_eq!(out.counters(), vec![c(A, 7, 1)]);
    }

    #[test]
    fn agarwal_merge_drops_counters_equal_to_cut() {
        let s1 = summary(3, &[c(A, 2, 0), c(B, 4, 0)]);
        let s2 = summary(3, &[c(C, 4, 0), c(D, 9, 0)]);
        // sorted: A2 B4 C4 D9, excess 2, cut = 4
        let out = agarwal_merge_step(&s1, &s2).unwrap();
        assert_eq!(out.counters(), vec![c(D, 5, 0)]);
        assert!(!out.contains(Item(C)));
    }
}
