//! Cycle signatures of odd elements.
//!
//! Walking once around a cycle from an odd element `m` takes `x` odd steps,
//! each followed by `y_i >= 1` halvings. Folding the steps together gives
//!
//! ```text
//! z_0 = r
//! z_i = q * z_{i-1} + r * 2^(y_0 + ... + y_{i-1})
//! ```
//!
//! and the closed form `(q^x * m + z) / 2^y = m` with `z = z_{x-1}` and
//! `y = y_0 + ... + y_{x-1}`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::collatz::{odd_successor, DomainError};
use crate::cycle::MinNormalCycle;
use crate::nat::{serialize_bigint, serialize_bigints, MapParams, Nat};

/// Library default for the number of odd steps `decompose` may take.
pub const DEFAULT_ODD_STEP_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// The odd orbit of `m` entered a cycle that does not contain `m`;
    /// `witness` is the first odd value seen twice.
    #[error("{m} is not on a cycle: its odd orbit revisits {witness} after {odd_steps} odd steps")]
    NotOnCycle { m: Nat, witness: Nat, odd_steps: u64 },
    #[error("{m} did not return to itself within {cap} odd steps")]
    CapExceeded { m: Nat, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSignature {
    pub m: Nat,
    /// Number of odd steps (odd elements on the cycle).
    pub x: u64,
    /// Total number of halvings (even elements on the cycle).
    pub y: u64,
    pub y_profile: Vec<u64>,
    #[serde(serialize_with = "serialize_bigint")]
    pub z: BigInt,
    /// The per-step accumulators `z_0 .. z_{x-1}`; the last equals `z`.
    #[serde(serialize_with = "serialize_bigints")]
    pub z_steps: Vec<BigInt>,
    pub map: MapParams,
}

impl CycleSignature {
    /// `2^y - q^x`.
    pub fn power_gap(&self) -> BigInt {
        pow2(self.y) - pow(self.map.q(), self.x)
    }

    /// `m * (2^y - q^x) == z`.
    pub fn identity_holds(&self) -> bool {
        self.m.to_bigint() * self.power_gap() == self.z
    }

    /// `z` evaluated from the profile as
    /// `r * sum_t q^(x-1-t) * 2^(y_0 + ... + y_{t-1})`, independent of the
    /// step recurrence.
    pub fn closed_form_z(&self) -> BigInt {
        let mut sum = BigInt::zero();
        let mut prefix = 0u64;
        for (t, &yt) in self.y_profile.iter().enumerate() {
            sum += pow(self.map.q(), self.x - 1 - t as u64) * pow2(prefix);
            prefix += yt;
        }
        sum * self.map.r()
    }
}

pub(crate) fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

pub(crate) fn pow(base: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

/// Walks odd successors from `m` until `m` recurs, accumulating the signature.
pub fn decompose(m: &Nat, map: &MapParams, step_cap: u64) -> Result<CycleSignature, DecomposeError> {
    if m.is_zero() {
        return Err(DomainError::Zero.into());
    }
    if m.is_even() {
        return Err(DomainError::NotOdd(m.clone()).into());
    }
    let q = BigInt::from(map.q());
    let r = BigInt::from(map.r());

    let mut seen: HashSet<Nat> = HashSet::new();
    seen.insert(m.clone());
    let mut cur = m.clone();
    let mut y = 0u64;
    let mut z = BigInt::zero();
    let mut y_profile = Vec::new();
    let mut z_steps = Vec::new();

    for i in 0..step_cap {
        let (next, halvings) = odd_successor(&cur, map)?;
        z = if i == 0 { r.clone() } else { &q * &z + &r * pow2(y) };
        y += halvings;
        y_profile.push(halvings);
        z_steps.push(z.clone());
        if &next == m {
            return Ok(CycleSignature {
                m: m.clone(),
                x: y_profile.len() as u64,
                y,
                y_profile,
                z,
                z_steps,
                map: map.clone(),
            });
        }
        if !seen.insert(next.clone()) {
            return Err(DecomposeError::NotOnCycle {
                m: m.clone(),
                witness: next,
                odd_steps: i + 1,
            });
        }
        cur = next;
    }
    Err(DecomposeError::CapExceeded {
        m: m.clone(),
        cap: step_cap,
    })
}

/// One signature per odd element, in cycle order.
pub fn signatures_for_cycle(
    mc: &MinNormalCycle,
    step_cap: u64,
) -> Result<Vec<CycleSignature>, DecomposeError> {
    mc.elements()
        .iter()
        .filter(|e| e.is_odd())
        .map(|e| decompose(e, mc.map(), step_cap))
        .collect()
}

/// Checks the closed-form identity and replays the profile through the map.
pub fn verify_signature(sig: &CycleSignature) -> bool {
    if sig.m.is_zero() || sig.m.is_even() {
        return false;
    }
    if sig.x == 0
        || sig.y_profile.len() as u64 != sig.x
        || sig.y_profile.contains(&0)
        || sig.y_profile.iter().sum::<u64>() != sig.y
    {
        return false;
    }
    if !sig.identity_holds() {
        return false;
    }
    let mut cur = sig.m.clone();
    for &expected in &sig.y_profile {
        match odd_successor(&cur, &sig.map) {
            Ok((next, halvings)) if halvings == expected => cur = next,
            _ => return false,
        }
    }
    cur == sig.m
}

/// Sign of `z` must follow the sign of `r`.
pub fn sign_matches_addend(sig: &CycleSignature) -> bool {
    if sig.map.r() > 0 {
        sig.z.is_positive()
    } else {
        sig.z.is_negative()
    }
}
