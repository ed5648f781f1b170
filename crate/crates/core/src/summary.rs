//! The sequential Space Saving summary.
//!
//! A [`Summary`] monitors at most `k` distinct items. Each counter carries an
//! estimated frequency, which never underestimates the true count of its item,
//! and an error bound, such that `est_freq - err` never overestimates it.
//!
//! Counters live in an indexed binary min-heap keyed by `(est_freq, item)`, so
//! the counter evicted by [`Summary::update`] is always the one with the
//! smallest frequency, ties going to the smallest item value. Lookup by item is
//! a hash probe; ordered iteration sorts a copy of the heap.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// An element of the stream universe.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Item(pub u32);

impl From<u32> for Item {
    fn from(value: u32) -> Self {
        Item(value)
    }
}

impl From<Item> for u32 {
    fn from(item: Item) -> Self {
        item.0
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Wraps a slice of raw values as a stream of items without copying.
pub fn as_items(values: &[u32]) -> &[Item] {
    // SAFETY: `Item` is `repr(transparent)` over `u32`.
    unsafe { std::slice::from_raw_parts(values.as_ptr().cast::<Item>(), values.len()) }
}

/// A monitored item with its estimated frequency and overestimation bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Counter {
    pub item: Item,
    pub est_freq: u64,
    pub err: u64,
}

impl Counter {
    pub fn new(item: impl Into<Item>, est_freq: u64, err: u64) -> Self {
        Counter {
            item: item.into(),
            est_freq,
            err,
        }
    }

    /// Total order used everywhere counters are sorted.
    #[inline]
    pub fn key(&self) -> (u64, Item) {
        (self.est_freq, self.item)
    }

    /// Lower bound on the item's true frequency.
    pub fn guaranteed_freq(&self) -> u64 {
        self.est_freq.saturating_sub(self.err)
    }
}

/// Sorts counters ascending by `(est_freq, item)`.
pub fn sort_counters(counters: &mut [Counter]) {
    counters.sort_unstable_by_key(Counter::key);
}

pub(crate) fn check_capacity(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidCapacity(k));
    }
    Ok(())
}

/// The Space Saving stream summary.
#[derive(Clone)]
pub struct Summary {
    k: usize,
    heap: Vec<Counter>,
    index: FxHashMap<Item, usize>,
}

impl Summary {
    pub fn new(k: usize) -> Result<Self> {
        check_capacity(k)?;
        let mut index = FxHashMap::default();
        index.reserve(k);
        Ok(Summary {
            k,
            heap: Vec::with_capacity(k),
            index,
        })
    }

    /// Builds a summary from explicit counters, in any order.
    ///
    /// Rejects more than `k` counters, repeated items and zero frequencies.
    pub fn from_counters(k: usize, counters: impl IntoIterator<Item = Counter>) -> Result<Self> {
        let mut summary = Summary::new(k)?;
        for counter in counters {
            if summary.heap.len() == k {
                return Err(Error::Overfull { nz: k + 1, k });
            }
            if counter.est_freq == 0 {
                return Err(Error::ZeroFrequency(counter.item.0));
            }
            if summary.index.contains_key(&counter.item) {
                return Err(Error::DuplicateItem(counter.item.0));
            }
            summary.index.insert(counter.item, summary.heap.len());
            summary.heap.push(counter);
        }
        for i in (0..summary.heap.len() / 2).rev() {
            summary.sift_down(i);
        }
        Ok(summary)
    }

    /// Runs Space Saving over `stream` with `k` counters.
    pub fn from_stream(k: usize, stream: &[Item]) -> Result<Self> {
        let mut summary = Summary::new(k)?;
        summary.extend(stream.iter().copied());
        Ok(summary)
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    /// Number of stored counters (`nz`).
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.heap.len() == self.k
    }

    /// Processes one occurrence of `x`.
    pub fn update(&mut self, x: Item) {
        if let Some(&pos) = self.index.get(&x) {
            self.heap[pos].est_freq += 1;
            self.sift_down(pos);
        } else if self.heap.len() < self.k {
            let pos = self.heap.len();
            self.heap.push(Counter::new(x, 1, 0));
            self.index.insert(x, pos);
            self.sift_up(pos);
        } else {
            let evicted = self.heap[0];
            self.index.remove(&evicted.item);
            self.heap[0] = Counter::new(x, evicted.est_freq + 1, evicted.est_freq);
            self.index.insert(x, 0);
            self.sift_down(0);
        }
    }

    /// Smallest stored frequency when the summary is full, 0 otherwise.
    pub fn min_frequency(&self) -> u64 {
        if self.is_full() {
            self.heap[0].est_freq
        } else {
            0
        }
    }

    pub fn get(&self, x: Item) -> Option<&Counter> {
        self.index.get(&x).map(|&pos| &self.heap[pos])
    }

    /// `(est_freq, err)` for a monitored item. Unmonitored items occurred at
    /// most [`min_frequency`](Self::min_frequency) times.
    pub fn point_estimate(&self, x: Item) -> Option<(u64, u64)> {
        self.get(x).map(|c| (c.est_freq, c.err))
    }

    pub fn contains(&self, x: Item) -> bool {
        self.index.contains_key(&x)
    }

    /// Sum of the stored frequencies.
    pub fn total(&self) -> u64 {
        self.heap.iter().map(|c| c.est_freq).sum()
    }

    /// Counters in ascending `(est_freq, item)` order.
    pub fn counters(&self) -> Vec<Counter> {
        let mut out = self.heap.clone();
        sort_counters(&mut out);
        out
    }

    /// Counters in heap order; cheaper than [`counters`](Self::counters) when
    /// order does not matter.
    pub fn iter_unordered(&self) -> impl Iterator<Item = &Counter> + '_ {
        self.heap.iter()
    }

    pub fn into_counters(self) -> Vec<Counter> {
        let mut out = self.heap;
        sort_counters(&mut out);
        out
    }

    /// Keeps the counters at or above the k-majority threshold for a stream
    /// of length `n`.
    pub fn prune(&self, n: u64) -> Result<FrequentReport> {
        if n == 0 {
            return Err(Error::EmptyStream);
        }
        let threshold = majority_threshold(n, self.k);
        let entries = self
            .counters()
            .into_iter()
            .rev()
            .take_while(|c| c.est_freq >= threshold)
            .map(|c| ReportEntry {
                item: c.item,
                est_freq: c.est_freq,
                err: c.err,
                guaranteed: c.guaranteed_freq() >= threshold,
            })
            .collect();
        Ok(FrequentReport { threshold, entries })
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if self.heap[pos].key() >= self.heap[parent].key() {
                break;
            }
            self.swap(pos, parent);
            pos = parent;
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        let len = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.heap[right].key() < self.heap[left].key() {
                right
            } else {
                left
            };
            if self.heap[pos].key() <= self.heap[child].key() {
                break;
            }
            self.swap(pos, child);
            pos = child;
        }
    }

    #[inline]
    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.index.insert(self.heap[a].item, a);
        self.index.insert(self.heap[b].item, b);
    }
}

impl Extend<Item> for Summary {
    fn extend<I: IntoIterator<Item = Item>>(&mut self, iter: I) {
        for x in iter {
            self.update(x);
        }
    }
}

impl PartialEq for Summary {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.counters() == other.counters()
    }
}

impl Eq for Summary {}

impl fmt::Debug for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Summary")
            .field("k", &self.k)
            .field("counters", &self.counters())
            .finish()
    }
}

/// Runs Space Saving over a whole stream.
pub fn process(stream: &[Item], k: usize) -> Result<Summary> {
    Summary::from_stream(k, stream)
}

/// Smallest count that makes an item a k-majority element of a stream of
/// length `n`: strictly more than `n / k` occurrences.
pub fn majority_threshold(n: u64, k: usize) -> u64 {
    n / k as u64 + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportEntry {
    pub item: Item,
    pub est_freq: u64,
    pub err: u64,
    /// Set when `est_freq - err` alone clears the threshold.
    pub guaranteed: bool,
}

/// Frequent-item candidates, most frequent first (ties by ascending item).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequentReport {
    pub threshold: u64,
    pub entries: Vec<ReportEntry>,
}

impl FrequentReport {
    /// Every counter of `summary` as a non-guaranteed candidate.
    pub fn unfiltered(summary: &Summary) -> Self {
        let entries = summary
            .counters()
            .into_iter()
            .rev()
            .map(|c| ReportEntry {
                item: c.item,
                est_freq: c.est_freq,
                err: c.err,
                guaranteed: false,
            })
            .collect();
        FrequentReport { threshold: 1, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.entries.iter().map(|e| e.item)
    }
}
