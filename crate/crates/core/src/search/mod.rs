//! Parallel range verification and cycle census.
//!
//! Seeds are split into contiguous partitions, each partition produces a
//! partial report, and partials are combined with an associative,
//! commutative merge. Reports therefore do not depend on the partition count
//! or on scheduling order; only `elapsed_ms` and `partition_count` (run
//! metadata) differ between runs.

mod census;
pub(crate) mod kernel;
mod range;

use std::ops::RangeInclusive;
use std::sync::Mutex;

use thiserror::Error;

use crate::cycle::CapReason;
use crate::nat::MapParams;

pub use census::{find_cycles, find_cycles_with, CycleCensus, CycleSearchOptions, CycleSearchReport};
pub use range::{verify_range, verify_range_with, RangeOptions, RangeStats, RangeVerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("range verification is defined for the standard map only (got {0})")]
    NonStandardMap(MapParams),
    #[error("the upper bound must be at least 1")]
    EmptyRange,
    /// A seed exceeded the safety caps: either a divergent orbit or a new
    /// cycle. Never skipped silently.
    #[error("seed {seed} exhausted the {reason:?} safety cap")]
    CapExhausted { seed: u64, reason: CapReason },
}

/// Splits `1..=n_max` into `parts` contiguous ranges whose sizes differ by at
/// most one. Never returns empty ranges.
pub(crate) fn partition(n_max: u64, parts: usize) -> Vec<RangeInclusive<u64>> {
    let parts = (parts.max(1) as u64).min(n_max.max(1));
    let base = n_max / parts;
    let extra = n_max % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 1u64;
    for i in 0..parts {
        let len = base + u64::from(i < extra);
        out.push(start..=start + len - 1);
        start += len;
    }
    out
}

/// Serializes progress callbacks so the reported count only ever grows.
pub(crate) struct Progress<'a> {
    done: Mutex<u64>,
    hook: Option<&'a (dyn Fn(u64) + Sync)>,
}

impl<'a> Progress<'a> {
    pub(crate) fn new(hook: Option<&'a (dyn Fn(u64) + Sync)>) -> Self {
        Progress {
            done: Mutex::new(0),
            hook,
        }
    }

    pub(crate) fn advance(&self, seeds: u64) {
        if let Some(hook) = self.hook {
            let mut done = self.done.lock().expect("progress lock");
            *done += seeds;
            hook(*done);
        }
    }
}

/// Seeds handled between progress callbacks.
pub(crate) const PROGRESS_CHUNK: u64 = 4096;
