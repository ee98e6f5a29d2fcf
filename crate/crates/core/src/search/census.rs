use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::range::serialize_ms;
use super::{partition, Progress, PROGRESS_CHUNK};
use crate::cycle::{detect_cycle, min_normalize, MinNormalCycle};
use crate::nat::{MapParams, Nat};

/// Capped seeds kept as examples in a report.
pub const DIVERGED_SAMPLE: usize = 10;

pub struct CycleSearchOptions<'a> {
    pub partition_hint: usize,
    pub progress: Option<&'a (dyn Fn(u64) + Sync)>,
}

impl Default for CycleSearchOptions<'_> {
    fn default() -> Self {
        CycleSearchOptions {
            partition_hint: 1,
            progress: None,
        }
    }
}

/// The deterministic part of a cycle search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    pub map: MapParams,
    pub seed_max: u64,
    pub step_cap: u64,
    pub value_cap: Nat,
    /// Distinct min-normal cycles, ascending by minimum.
    pub cycles: Vec<MinNormalCycle>,
    pub capped_seed_count: u64,
    /// The smallest capped seeds.
    pub diverged_examples: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleSearchReport {
    #[serde(flatten)]
    pub census: CycleCensus,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_ms")]
    pub elapsed: Duration,
    pub partition_count: usize,
}

impl CycleSearchReport {
    pub fn minima(&self) -> Vec<Nat> {
        self.census.cycles.iter().map(|c| c.min().clone()).collect()
    }
}

#[derive(Default)]
struct Partial {
    cycles: BTreeMap<Nat, MinNormalCycle>,
    capped: u64,
    examples: Vec<u64>,
}

impl Partial {
    fn merge(mut a: Partial, b: Partial) -> Partial {
        for (min, c) in b.cycles {
            a.cycles.entry(min).or_insert(c);
        }
        a.capped += b.capped;
        a.examples.extend(b.examples);
        a.examples.sort_unstable();
        a.examples.truncate(DIVERGED_SAMPLE);
        a
    }
}

pub fn find_cycles(map: &MapParams, seed_max: u64, step_cap: u64, value_cap: &Nat) -> CycleSearchReport {
    find_cycles_with(map, seed_max, step_cap, value_cap, &CycleSearchOptions::default())
}

/// Every cycle reached from seeds `1..=seed_max` within the caps, keyed by
/// its min-normal form. Seeds that hit a cap are counted, not dropped.
pub fn find_cycles_with(
    map: &MapParams,
    seed_max: u64,
    step_cap: u64,
    value_cap: &Nat,
    opts: &CycleSearchOptions<'_>,
) -> CycleSearchReport {
    let started = Instant::now();
    let ranges = if seed_max == 0 {
        Vec::new()
    } else {
        partition(seed_max, opts.partition_hint)
    };
    let partition_count = ranges.len().max(1);
    let progress = Progress::new(opts.progress);

    let merged = ranges
        .into_par_iter()
        .map(|range| {
            let mut acc = Partial::default();
            let mut pending = 0u64;
            for seed in range {
                let detection = detect_cycle(&Nat::from(seed), map, step_cap, value_cap)
                    .expect("seeds start at 1");
                match detection.into_cycle() {
                    Some(cycle) => {
                        let mc = min_normalize(&cycle);
                        acc.cycles.entry(mc.min().clone()).or_insert(mc);
                    }
                    None => {
                        acc.capped += 1;
                        if acc.examples.len() < DIVERGED_SAMPLE {
                            acc.examples.push(seed);
                        }
                    }
                }
                pending += 1;
                if pending == PROGRESS_CHUNK {
                    progress.advance(pending);
                    pending = 0;
                }
            }
            progress.advance(pending);
            acc
        })
        .reduce(Partial::default, Partial::merge);

    CycleSearchReport {
        census: CycleCensus {
            map: map.clone(),
            seed_max,
            step_cap,
            value_cap: value_cap.clone(),
            cycles: merged.cycles.into_values().collect(),
            capped_seed_count: merged.capped,
            diverged_examples: merged.examples,
        },
        elapsed: started.elapsed(),
        partition_count,
    }
}
