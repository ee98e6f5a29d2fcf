use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::{self, Descent, FastError, Peak};
use super::{partition, Progress, SearchError, PROGRESS_CHUNK};
use crate::collatz::{DEFAULT_STEP_CAP, DEFAULT_VALUE_CAP_BITS};
use crate::cycle::CapReason;
use crate::nat::{MapParams, Nat};

/// Largest lookup table of stopping times, in entries.
const LOOKUP_LIMIT: u64 = 1 << 22;

pub struct RangeOptions<'a> {
    pub partition_hint: usize,
    /// Stopping times of small values are read from a precomputed table
    /// instead of being re-iterated. Changes nothing but the running time.
    pub use_lookup_table: bool,
    pub step_cap: u64,
    pub value_cap_bits: u64,
    pub progress: Option<&'a (dyn Fn(u64) + Sync)>,
}

impl Default for RangeOptions<'_> {
    fn default() -> Self {
        RangeOptions {
            partition_hint: 1,
            use_lookup_table: true,
            step_cap: DEFAULT_STEP_CAP,
            value_cap_bits: DEFAULT_VALUE_CAP_BITS,
            progress: None,
        }
    }
}

/// The deterministic part of a range verification.
///
/// `max_excursion` is the largest value on any trajectory from a seed in
/// `1..=n_max`; ties resolve to the smallest seed, as for `max_total_steps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeStats {
    pub n_max: u64,
    pub verified_count: u64,
    pub max_excursion: Nat,
    pub max_excursion_seed: u64,
    pub max_total_steps: u64,
    pub max_total_steps_seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeVerificationReport {
    #[serde(flatten)]
    pub stats: RangeStats,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_ms")]
    pub elapsed: Duration,
    pub partition_count: usize,
}

pub(crate) fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

#[derive(Debug, Clone)]
struct Partial {
    verified: u64,
    excursion: (Peak, u64),
    total_steps: (u64, u64),
}

impl Partial {
    fn absorb(&mut self, seed: u64, peak: Peak, steps: u64) {
        self.verified += 1;
        let first = self.verified == 1;
        if first || peak > self.excursion.0 {
            self.excursion = (peak, seed);
        }
        if first || steps > self.total_steps.0 {
            self.total_steps = (steps, seed);
        }
    }

    fn merge(a: Partial, b: Partial) -> Partial {
        // larger value wins; equal values keep the smaller seed
        let excursion = match a.excursion.0.cmp(&b.excursion.0) {
            std::cmp::Ordering::Greater => a.excursion,
            std::cmp::Ordering::Less => b.excursion,
            std::cmp::Ordering::Equal => {
                if a.excursion.1 <= b.excursion.1 {
                    a.excursion
                } else {
                    b.excursion
                }
            }
        };
        let total_steps = match a.total_steps.0.cmp(&b.total_steps.0) {
            std::cmp::Ordering::Greater => a.total_steps,
            std::cmp::Ordering::Less => b.total_steps,
            std::cmp::Ordering::Equal => (a.total_steps.0, a.total_steps.1.min(b.total_steps.1)),
        };
        Partial {
            verified: a.verified + b.verified,
            excursion,
            total_steps,
        }
    }
}

pub fn verify_range(
    n_max: u64,
    map: &MapParams,
    partition_hint: usize,
) -> Result<RangeVerificationReport, SearchError> {
    verify_range_with(
        n_max,
        map,
        &RangeOptions {
            partition_hint,
            ..RangeOptions::default()
        },
    )
}

/// Verifies that every seed in `1..=n_max` reaches 1 under the standard map.
///
/// Each seed is only followed until it drops below itself; by induction on
/// the seed, all smaller values are already known to reach 1. Seed 1 lies on
/// the trivial cycle and is accepted as is.
pub fn verify_range_with(
    n_max: u64,
    map: &MapParams,
    opts: &RangeOptions<'_>,
) -> Result<RangeVerificationReport, SearchError> {
    if !map.is_standard() {
        return Err(SearchError::NonStandardMap(map.clone()));
    }
    if n_max == 0 {
        return Err(SearchError::EmptyRange);
    }
    let started = Instant::now();
    let ctx = Ctx {
        step_cap: opts.step_cap,
        value_cap_bits: opts.value_cap_bits,
        table: if opts.use_lookup_table {
            build_table((n_max + 1).min(LOOKUP_LIMIT), opts.step_cap, opts.value_cap_bits)?
        } else {
            Vec::new()
        },
    };
    let progress = Progress::new(opts.progress);
    let ranges = partition(n_max, opts.partition_hint);
    let partition_count = ranges.len();

    let partials: Vec<Result<Partial, SearchError>> = ranges
        .into_par_iter()
        .map(|range| {
            let mut acc = Partial {
                verified: 0,
                excursion: (Peak::Narrow(0), 0),
                total_steps: (0, 0),
            };
            let mut pending = 0u64;
            for seed in range {
                let (peak, steps) = ctx.seed(seed)?;
                acc.absorb(seed, peak, steps);
                pending += 1;
                if pending == PROGRESS_CHUNK {
                    progress.advance(pending);
                    pending = 0;
                }
            }
            progress.advance(pending);
            Ok(acc)
        })
        .collect();

    // deterministic failure: the smallest failing seed across partitions
    let mut merged: Option<Partial> = None;
    let mut failure: Option<SearchError> = None;
    for p in partials {
        match p {
            Ok(p) => merged = Some(match merged {
                Some(m) => Partial::merge(m, p),
                None => p,
            }),
            Err(e) => {
                let replace = match (&failure, &e) {
                    (None, _) => true,
                    (
                        Some(SearchError::CapExhausted { seed: old, .. }),
                        SearchError::CapExhausted { seed: new, .. },
                    ) => new < old,
                    _ => false,
                };
                if replace {
                    failure = Some(e);
                }
            }
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let merged = merged.expect("at least one partition");
    Ok(RangeVerificationReport {
        stats: RangeStats {
            n_max,
            verified_count: merged.verified,
            max_excursion: Nat::from(merged.excursion.0.to_biguint()),
            max_excursion_seed: merged.excursion.1,
            max_total_steps: merged.total_steps.0,
            max_total_steps_seed: merged.total_steps.1,
        },
        elapsed: started.elapsed(),
        partition_count,
    })
}

struct Ctx {
    step_cap: u64,
    value_cap_bits: u64,
    /// Stopping times of `0..table.len()`; entry 0 is unused.
    table: Vec<u32>,
}

impl Ctx {
    /// Peak before descent and total stopping time of one seed.
    ///
    /// The peak before descent is enough for the range maximum: a trajectory
    /// after its descent is the trajectory of a smaller seed, whose own peak
    /// is already counted, so the maximum and its smallest argmax agree with
    /// full-trajectory maxima.
    fn seed(&self, seed: u64) -> Result<(Peak, u64), SearchError> {
        if seed == 1 {
            return Ok((Peak::Narrow(1), 0));
        }
        let cap = |reason| SearchError::CapExhausted { seed, reason };
        match kernel::descend(seed as u128, self.step_cap) {
            Ok(Descent {
                steps,
                peak,
                landing,
            }) => {
                let rest = self.stopping_time(landing).map_err(cap)?;
                Ok((peak, steps + rest))
            }
            Err(FastError::StepCap) => Err(cap(CapReason::StepCap)),
            Err(FastError::Overflow) => {
                let d = kernel::descend_wide(&BigUint::from(seed), self.step_cap, self.value_cap_bits)
                    .map_err(cap)?;
                let rest = kernel::stopping_time_wide(&d.landing, self.step_cap, self.value_cap_bits)
                    .map_err(cap)?;
                Ok((d.peak, d.steps + rest))
            }
        }
    }

    fn stopping_time(&self, v: u128) -> Result<u64, CapReason> {
        if v < self.table.len() as u128 {
            return Ok(self.table[v as usize] as u64);
        }
        match kernel::stopping_time(v, self.step_cap) {
            Ok(steps) => Ok(steps),
            Err(FastError::StepCap) => Err(CapReason::StepCap),
            Err(FastError::Overflow) => {
                kernel::stopping_time_wide(&BigUint::from(v), self.step_cap, self.value_cap_bits)
            }
        }
    }
}

fn build_table(len: u64, step_cap: u64, value_cap_bits: u64) -> Result<Vec<u32>, SearchError> {
    let mut table = vec![0u32; len as usize];
    for v in 2..len {
        let cap = |reason| SearchError::CapExhausted { seed: v, reason };
        let (steps, landing) = match kernel::descend(v as u128, step_cap) {
            Ok(d) => (d.steps, d.landing as usize),
            Err(FastError::StepCap) => return Err(cap(CapReason::StepCap)),
            Err(FastError::Overflow) => {
                let d = kernel::descend_wide(&BigUint::from(v), step_cap, value_cap_bits).map_err(cap)?;
                let landing = u64::try_from(&d.landing).expect("landing below seed") as usize;
                (d.steps, landing)
            }
        };
        table[v as usize] = (steps + table[landing] as u64) as u32;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_map() -> MapParams {
        MapParams::standard()
    }

    #[test]
    fn small_ranges() {
        let rep = verify_range(1, &std_map(), 1).unwrap();
        assert_eq!(rep.stats.verified_count, 1);
        assert_eq!(rep.stats.max_excursion, Nat::one());
        assert_eq!((rep.stats.max_total_steps, rep.stats.max_total_steps_seed), (0, 1));

        let rep = verify_range(10, &std_map(), 3).unwrap();
        assert_eq!(rep.stats.verified_count, 10);
        assert_eq!((rep.stats.max_excursion.clone(), rep.stats.max_excursion_seed), (Nat::from(52u32), 7));
        assert_eq!((rep.stats.max_total_steps, rep.stats.max_total_steps_seed), (19, 9));
    }

    #[test]
    fn frozen_statistics() {
        // brute-force full-trajectory oracle, computed before implementation
        let rep = verify_range(1000, &std_map(), 2).unwrap();
        assert_eq!(rep.stats.max_excursion, Nat::from(250_504u32));
        assert_eq!(rep.stats.max_excursion_seed, 703);
        assert_eq!((rep.stats.max_total_steps, rep.stats.max_total_steps_seed), (178, 871));

        let rep = verify_range(10_000, &std_map(), 8).unwrap();
        assert_eq!(rep.stats.verified_count, 10_000);
        assert_eq!(rep.stats.max_excursion, Nat::from(27_114_424u32));
        assert_eq!(rep.stats.max_excursion_seed, 9663);
        assert_eq!((rep.stats.max_total_steps, rep.stats.max_total_steps_seed), (261, 6171));
    }

    #[test]
    fn rejects_other_maps_and_empty_range() {
        assert!(matches!(
            verify_range(10, &MapParams::three_n_minus_one(), 1),
            Err(SearchError::NonStandardMap(_))
        ));
        assert_eq!(verify_range(0, &std_map(), 1).unwrap_err(), SearchError::EmptyRange);
    }

    #[test]
    fn tiny_caps_are_reported() {
        let opts = RangeOptions {
            step_cap: 50,
            ..RangeOptions::default()
        };
        assert_eq!(
            verify_range_with(100, &std_map(), &opts).unwrap_err(),
            SearchError::CapExhausted {
                seed: 27,
                reason: CapReason::StepCap
            }
        );
        let opts = RangeOptions {
            step_cap: 50,
            partition_hint: 4,
            use_lookup_table: false,
            ..RangeOptions::default()
        };
        assert!(matches!(
            verify_range_with(100, &std_map(), &opts).unwrap_err(),
            SearchError::CapExhausted { seed: 27, .. }
        ));
    }

    #[test]
    fn progress_is_monotonic_and_complete() {
        use std::sync::Mutex;
        let seen = Mutex::new(Vec::new());
        let hook = |n: u64| seen.lock().unwrap().push(n);
        let opts = RangeOptions {
            partition_hint: 8,
            progress: Some(&hook),
            ..RangeOptions::default()
        };
        verify_range_with(50_000, &std_map(), &opts).unwrap();
        let seen = seen.into_inner().unwrap();
        assert!(seen.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*seen.last().unwrap(), 50_000);
    }
}
