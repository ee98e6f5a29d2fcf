//! Single steps, iterates, trajectories and 2-adic helpers.
//!
//! The domain is the positive integers; every entry point rejects `0`.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::nat::{MapParams, Nat};

/// Library default for the number of map applications a trajectory may take.
pub const DEFAULT_STEP_CAP: u64 = 100_000;

/// Library default value cap, as a power of two.
pub const DEFAULT_VALUE_CAP_BITS: u64 = 512;

pub fn default_value_cap() -> Nat {
    Nat::pow2(DEFAULT_VALUE_CAP_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("0 is outside the domain; inputs must be at least 1")]
    Zero,
    #[error("{0} is even; an odd value is required")]
    NotOdd(Nat),
}

/// One application of the map.
pub fn step(n: &Nat, map: &MapParams) -> Result<Nat, DomainError> {
    if n.is_zero() {
        return Err(DomainError::Zero);
    }
    Ok(step_unchecked(n, map))
}

pub(crate) fn step_unchecked(n: &Nat, map: &MapParams) -> Nat {
    let v = n.as_biguint();
    if n.is_even() {
        Nat::from(v >> 1u32)
    } else {
        Nat::from(map.odd_image(v))
    }
}

/// `i` applications of the map; `iterate(n, 0) = n`.
pub fn iterate(n: &Nat, i: u64, map: &MapParams) -> Result<Nat, DomainError> {
    if n.is_zero() {
        return Err(DomainError::Zero);
    }
    let mut cur = n.clone();
    for _ in 0..i {
        cur = step_unchecked(&cur, map);
    }
    Ok(cur)
}

/// 2-adic valuation: the number of halvings available before `n` turns odd.
pub fn v2(n: &Nat) -> Result<u64, DomainError> {
    n.as_biguint().trailing_zeros().ok_or(DomainError::Zero)
}

/// One odd step followed by every available halving.
///
/// Returns the next odd value together with the number of halvings, so that
/// `iterate(m, halvings + 1) == next`.
pub fn odd_successor(m: &Nat, map: &MapParams) -> Result<(Nat, u64), DomainError> {
    if m.is_zero() {
        return Err(DomainError::Zero);
    }
    if m.is_even() {
        return Err(DomainError::NotOdd(m.clone()));
    }
    let image = map.odd_image(m.as_biguint());
    // q, r odd: image is even and nonzero
    let halvings = image.trailing_zeros().expect("odd image is nonzero");
    Ok((Nat::from(image >> halvings), halvings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedOne,
    CycleClosed,
    StepCapHit,
    ValueCapHit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryRecord {
    pub start: Nat,
    pub values: Vec<Nat>,
    pub stop_reason: StopReason,
    pub max_excursion: Nat,
    pub total_steps: u64,
}

/// Iterates from `n` until the orbit reaches 1 (standard map only), revisits
/// an earlier value, exceeds `value_cap`, or has taken `step_cap` steps.
///
/// A start value above `value_cap` stops immediately with `ValueCapHit`.
pub fn trajectory(
    n: &Nat,
    map: &MapParams,
    step_cap: u64,
    value_cap: &Nat,
) -> Result<TrajectoryRecord, DomainError> {
    if n.is_zero() {
        return Err(DomainError::Zero);
    }
    let mut values = vec![n.clone()];
    let mut seen: HashSet<Nat> = HashSet::new();
    seen.insert(n.clone());
    let mut max_excursion = n.clone();

    let stop_reason = if n > value_cap {
        StopReason::ValueCapHit
    } else {
        loop {
            if values.len() as u64 > step_cap {
                break StopReason::StepCapHit;
            }
            let next = step_unchecked(values.last().expect("nonempty"), map);
            if next > max_excursion {
                max_excursion = next.clone();
            }
            let repeat = !seen.insert(next.clone());
            let over = &next > value_cap;
            let one = next.is_one();
            values.push(next);
            if repeat {
                break StopReason::CycleClosed;
            }
            if map.is_standard() && one {
                break StopReason::ReachedOne;
            }
            if over {
                break StopReason::ValueCapHit;
            }
        }
    };

    Ok(TrajectoryRecord {
        start: n.clone(),
        total_steps: values.len() as u64 - 1,
        values,
        stop_reason,
        max_excursion,
    })
}
