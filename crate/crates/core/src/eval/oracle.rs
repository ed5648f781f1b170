use std::collections::BTreeSet;
use std::io::{Read, Write};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::summary::{majority_threshold, Item};

/// Exact item counts of a stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: FxHashMap<Item, u64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct ManifestRow {
    item: u32,
    count: u64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_stream(stream: &[Item]) -> Self {
        let mut table = Self::new();
        table.extend(stream.iter().copied());
        table
    }

    pub fn add(&mut self, item: Item, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(item).or_insert(0) += count;
        self.total += count;
    }

    pub fn get(&self, item: Item) -> u64 {
        self.counts.get(&item).copied().unwrap_or(0)
    }

    /// Stream length.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Item, u64)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    /// `(item, count)` pairs by ascending item.
    pub fn sorted(&self) -> Vec<(Item, u64)> {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_unstable();
        rows
    }

    /// Items that occur more than `total / k` times.
    pub fn true_frequent(&self, k: usize) -> BTreeSet<Item> {
        if self.total == 0 {
            return BTreeSet::new();
        }
        let threshold = majority_threshold(self.total, k);
        self.iter().filter(|&(_, c)| c >= threshold).map(|(i, _)| i).collect()
    }

    /// Writes the `item,count` manifest, sorted by item.
    pub fn write_manifest<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for (item, count) in self.sorted() {
            out.serialize(ManifestRow { item: item.0, count })?;
        }
        if self.counts.is_empty() {
            out.write_record(["item", "count"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_manifest<R: Read>(reader: R) -> Result<Self> {
        let mut table = Self::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: ManifestRow = row?;
            table.add(Item(row.item), row.count);
        }
        Ok(table)
    }
}

impl Extend<Item> for FrequencyTable {
    fn extend<I: IntoIterator<Item = Item>>(&mut self, iter: I) {
        for item in iter {
            *self.counts.entry(item).or_insert(0) += 1;
            self.total += 1;
        }
    }
}

/// Brute-force counting oracle.
pub fn exact_frequencies(stream: &[Item]) -> FrequencyTable {
    FrequencyTable::from_stream(stream)
}

/// The k-majority items of the counted stream.
pub fn true_frequent(table: &FrequencyTable, k: usize) -> BTreeSet<Item> {
    table.true_frequent(k)
}
