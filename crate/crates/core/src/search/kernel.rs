//! Standard-map inner loops. Every odd step is batched with the halvings that
//! follow it: `n -> (3n + 1) >> v2(3n + 1)`, counted as `1 + v2` steps.
//!
//! The `u128` loops report `Overflow` instead of wrapping; callers then rerun
//! the seed through the `BigUint` loops.

use num_bigint::BigUint;
use num_traits::One;

use crate::cycle::CapReason;

/// Peak value of a trajectory. `Wide` is only used above `u128::MAX`, so the
/// derived ordering is numeric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Peak {
    Narrow(u128),
    Wide(BigUint),
}

impl Peak {
    fn from_biguint(v: BigUint) -> Self {
        match u128::try_from(&v) {
            Ok(small) => Peak::Narrow(small),
            Err(_) => Peak::Wide(v),
        }
    }

    pub(crate) fn to_biguint(&self) -> BigUint {
        match self {
            Peak::Narrow(v) => BigUint::from(*v),
            Peak::Wide(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Descent {
    pub steps: u64,
    pub peak: Peak,
    pub landing: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FastError {
    Overflow,
    StepCap,
}

/// Smallest `h` with `m >> h < seed`, given `m >= seed`.
fn halvings_below(m: u128, seed: u128) -> u64 {
    let mut h = 1;
    while (m >> h) >= seed {
        h += 1;
    }
    h
}

/// Follows `seed >= 2` until the first value below it.
pub(crate) fn descend(seed: u128, step_cap: u64) -> Result<Descent, FastError> {
    debug_assert!(seed >= 2);
    let mut n = seed;
    let mut steps = 0u64;
    let mut peak = seed;
    if n & 1 == 0 {
        return Ok(Descent {
            steps: 1,
            peak: Peak::Narrow(peak),
            landing: n >> 1,
        });
    }
    loop {
        let m = n
            .checked_mul(3)
            .and_then(|v| v.checked_add(1))
            .ok_or(FastError::Overflow)?;
        peak = peak.max(m);
        let t = m.trailing_zeros() as u64;
        let next = m >> t;
        if next >= seed {
            steps += 1 + t;
            n = next;
        } else {
            let h = halvings_below(m, seed);
            return Ok(Descent {
                steps: steps + 1 + h,
                peak: Peak::Narrow(peak),
                landing: m >> h,
            });
        }
        if steps > step_cap {
            return Err(FastError::StepCap);
        }
    }
}

/// Number of steps from `v >= 1` to 1.
pub(crate) fn stopping_time(v: u128, step_cap: u64) -> Result<u64, FastError> {
    let mut n = v;
    let mut steps = 0u64;
    while n != 1 {
        if n & 1 == 0 {
            let t = n.trailing_zeros();
            n >>= t;
            steps += t as u64;
        } else {
            let m = n
                .checked_mul(3)
                .and_then(|v| v.checked_add(1))
                .ok_or(FastError::Overflow)?;
            let t = m.trailing_zeros();
            n = m >> t;
            steps += 1 + t as u64;
        }
        if steps > step_cap {
            return Err(FastError::StepCap);
        }
    }
    Ok(steps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WideDescent {
    pub steps: u64,
    pub peak: Peak,
    pub landing: BigUint,
}

fn odd_batch_wide(n: &BigUint) -> (BigUint, BigUint, u64) {
    let m: BigUint = n * 3u32 + 1u32;
    let t = m.trailing_zeros().expect("3n + 1 is nonzero");
    let next = &m >> t;
    (m, next, t)
}

/// `descend` over arbitrary precision, bounded by `value_cap_bits`.
pub(crate) fn descend_wide(
    seed: &BigUint,
    step_cap: u64,
    value_cap_bits: u64,
) -> Result<WideDescent, CapReason> {
    if !seed.bit(0) {
        return Ok(WideDescent {
            steps: 1,
            peak: Peak::from_biguint(seed.clone()),
            landing: seed >> 1u32,
        });
    }
    let mut n = seed.clone();
    let mut steps = 0u64;
    let mut peak = seed.clone();
    loop {
        let (m, next, t) = odd_batch_wide(&n);
        if m.bits() > value_cap_bits {
            return Err(CapReason::ValueCap);
        }
        if m > peak {
            peak = m.clone();
        }
        if &next >= seed {
            steps += 1 + t;
            n = next;
        } else {
            let mut h = 1u64;
            while &(&m >> h) >= seed {
                h += 1;
            }
            return Ok(WideDescent {
                steps: steps + 1 + h,
                peak: Peak::from_biguint(peak),
                landing: m >> h,
            });
        }
        if steps > step_cap {
            return Err(CapReason::StepCap);
        }
    }
}

pub(crate) fn stopping_time_wide(
    v: &BigUint,
    step_cap: u64,
    value_cap_bits: u64,
) -> Result<u64, CapReason> {
    let mut n = v.clone();
    let mut steps = 0u64;
    while !n.is_one() {
        if n.bit(0) {
            let (m, next, t) = odd_batch_wide(&n);
            if m.bits() > value_cap_bits {
                return Err(CapReason::ValueCap);
            }
            n = next;
            steps += 1 + t;
        } else {
            let t = n.trailing_zeros().expect("nonzero");
            n >>= t;
            steps += t;
        }
        if steps > step_cap {
            return Err(CapReason::StepCap);
        }
    }
    Ok(steps)
}
