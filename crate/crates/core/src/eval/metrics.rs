use crate::eval::oracle::FrequencyTable;
use crate::summary::FrequentReport;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    /// Sum of `|f - est|` over reported items.
    pub total_error: u64,
    pub precision: f64,
    pub recall: f64,
    /// Mean of `|f - est| / f` over reported items.
    pub are: f64,
    pub reported: usize,
    pub true_frequent: usize,
}

/// Scores a report against the exact counts of the stream it summarizes.
///
/// Conventions for degenerate cases: with nothing reported, precision is 1
/// if nothing is frequent and 0 otherwise, and ARE is 0; with nothing
/// frequent, recall is 1; a reported item that never occurred contributes a
/// relative error of 1.
pub fn score(report: &FrequentReport, table: &FrequencyTable, k: usize) -> MetricsReport {
    let truth = table.true_frequent(k);
    let reported = report.entries.len();

    let mut hits = 0usize;
    let mut total_error = 0u64;
    let mut relative = 0.0;
    for entry in &report.entries {
        let f = table.get(entry.item);
        let abs = f.abs_diff(entry.est_freq);
        total_error += abs;
        relative += if f == 0 { 1.0 } else { abs as f64 / f as f64 };
        if truth.contains(&entry.item) {
            hits += 1;
        }
    }

    let precision = match (reported, truth.is_empty()) {
        (0, true) => 1.0,
        (0, false) => 0.0,
        _ => hits as f64 / reported as f64,
    };
    let recall = if truth.is_empty() {
        1.0
    } else {
        hits as f64 / truth.len() as f64
    };
    let are = if reported == 0 { 0.0 } else { relative / reported as f64 };

    MetricsReport {
        total_error,
        precision,
        recall,
        are,
        reported,
        true_frequent: truth.len(),
    }
}
