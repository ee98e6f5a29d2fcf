//! Cycle detection, min-normal rotation and the structural properties every
//! min-normal cycle carries.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::collatz::{iterate, step_unchecked, DomainError};
use crate::nat::{MapParams, Nat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("a cycle needs at least one element")]
    Empty,
    #[error("0 cannot appear in a cycle")]
    Zero,
    #[error("element {index} ({value}) does not map to the next element")]
    NotClosed { index: usize, value: Nat },
    #[error("element {0} appears more than once")]
    Repeated(Nat),
}

/// Elements in trajectory order; the last one maps back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    elements: Vec<Nat>,
    map: MapParams,
}

impl Cycle {
    pub fn new(elements: Vec<Nat>, map: MapParams) -> Result<Self, CycleError> {
        if elements.is_empty() {
            return Err(CycleError::Empty);
        }
        let mut seen = HashSet::with_capacity(elements.len());
        for e in &elements {
            if e.is_zero() {
                return Err(CycleError::Zero);
            }
            if !seen.insert(e) {
                return Err(CycleError::Repeated(e.clone()));
            }
        }
        for (index, value) in elements.iter().enumerate() {
            let next = &elements[(index + 1) % elements.len()];
            if &step_unchecked(value, &map) != next {
                return Err(CycleError::NotClosed {
                    index,
                    value: value.clone(),
                });
            }
        }
        Ok(Cycle { elements, map })
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elements
    }

    pub fn map(&self) -> &MapParams {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The same cycle read from `offset`.
    pub fn rotated(&self, offset: usize) -> Cycle {
        let mut elements = self.elements.clone();
        elements.rotate_left(offset % self.elements.len());
        Cycle {
            elements,
            map: self.map.clone(),
        }
    }
}

/// A cycle rotated so its smallest element comes first.
///
/// `k` is set when the minimum is odd, with `m0 = 2k + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinNormalCycle {
    elements: Vec<Nat>,
    map: MapParams,
    k: Option<Nat>,
}

impl MinNormalCycle {
    /// Validates `elements` as a cycle under `map` and normalizes it.
    pub fn from_elements(elements: Vec<Nat>, map: MapParams) -> Result<Self, CycleError> {
        Ok(min_normalize(&Cycle::new(elements, map)?))
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elements
    }

    pub fn map(&self) -> &MapParams {
        &self.map
    }

    pub fn k(&self) -> Option<&Nat> {
        self.k.as_ref()
    }

    pub fn min(&self) -> &Nat {
        &self.elements[0]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn odd_count(&self) -> usize {
        self.elements.iter().filter(|e| e.is_odd()).count()
    }

    pub fn even_count(&self) -> usize {
        self.len() - self.odd_count()
    }

    pub fn as_cycle(&self) -> Cycle {
        Cycle {
            elements: self.elements.clone(),
            map: self.map.clone(),
        }
    }
}

pub fn min_normalize(c: &Cycle) -> MinNormalCycle {
    let (pos, _) = c
        .elements
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .expect("cycles are nonempty");
    let mut elements = c.elements.clone();
    elements.rotate_left(pos);
    let m0 = &elements[0];
    let k = m0
        .is_odd()
        .then(|| Nat::from(m0.as_biguint() >> 1u32));
    MinNormalCycle {
        elements,
        map: c.map.clone(),
        k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapReason {
    StepCap,
    ValueCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum CycleDetection {
    Found { cycle: Cycle },
    Capped { reason: CapReason },
}

impl CycleDetection {
    pub fn cycle(&self) -> Option<&Cycle> {
        match self {
            CycleDetection::Found { cycle } => Some(cycle),
            CycleDetection::Capped { .. } => None,
        }
    }

    pub fn into_cycle(self) -> Option<Cycle> {
        match self {
            CycleDetection::Found { cycle } => Some(cycle),
            CycleDetection::Capped { .. } => None,
        }
    }
}

/// Finds the cycle the orbit of `n` falls into, in constant memory.
///
/// A cycle is reported only if the orbit closes within `step_cap` steps
/// (the repeat happens at step `mu + lambda <= step_cap`) and no value before
/// the repeat exceeds `value_cap`. The cycle is listed starting from the first
/// element the orbit reaches. This matches a seen-set detector exactly,
/// including which cap is reported.
pub fn detect_cycle(
    n: &Nat,
    map: &MapParams,
    step_cap: u64,
    value_cap: &Nat,
) -> Result<CycleDetection, DomainError> {
    if n.is_zero() {
        return Err(DomainError::Zero);
    }
    match brent(n, map, step_cap, value_cap) {
        Some((mu, lambda)) if mu + lambda <= step_cap => {
            let mut first = n.clone();
            for _ in 0..mu {
                first = step_unchecked(&first, map);
            }
            let mut elements = Vec::with_capacity(lambda as usize);
            let mut cur = first;
            for _ in 0..lambda {
                let next = step_unchecked(&cur, map);
                elements.push(cur);
                cur = next;
            }
            Ok(CycleDetection::Found {
                cycle: Cycle {
                    elements,
                    map: map.clone(),
                },
            })
        }
        _ => Ok(CycleDetection::Capped {
            reason: cap_reason(n, map, step_cap, value_cap),
        }),
    }
}

/// Brent's power-of-two search. Returns `(mu, lambda)` or `None` when a value
/// exceeds the cap or the hare budget runs out.
fn brent(n: &Nat, map: &MapParams, step_cap: u64, value_cap: &Nat) -> Option<(u64, u64)> {
    if n > value_cap {
        return None;
    }
    // phase one needs at most 3 * (mu + lambda) + 2 hare steps
    let budget = step_cap.saturating_mul(4).saturating_add(4);
    let mut power = 1u64;
    let mut lambda = 1u64;
    let mut tortoise = n.clone();
    let mut hare = step_unchecked(n, map);
    let mut hare_steps = 1u64;
    if &hare > value_cap {
        return None;
    }
    while tortoise != hare {
        if power == lambda {
            tortoise = hare.clone();
            power *= 2;
            lambda = 0;
        }
        hare = step_unchecked(&hare, map);
        hare_steps += 1;
        lambda += 1;
        if &hare > value_cap || hare_steps > budget {
            return None;
        }
    }

    let mut tortoise = n.clone();
    let mut hare = n.clone();
    for _ in 0..lambda {
        hare = step_unchecked(&hare, map);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step_unchecked(&tortoise, map);
        hare = step_unchecked(&hare, map);
        mu += 1;
    }
    Some((mu, lambda))
}

/// Which cap a seen-set detector would have reported first.
fn cap_reason(n: &Nat, map: &MapParams, step_cap: u64, value_cap: &Nat) -> CapReason {
    let mut cur = n.clone();
    if &cur > value_cap {
        return CapReason::ValueCap;
    }
    for _ in 0..step_cap {
        cur = step_unchecked(&cur, map);
        if &cur > value_cap {
            return CapReason::ValueCap;
        }
    }
    CapReason::StepCap
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub verdict: Verdict,
    pub witness: Option<Nat>,
    pub detail: String,
}

/// Verdicts for the five structural properties of a min-normal cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub k: Option<Nat>,
    pub m2: Nat,
    /// Set when the cycle has fewer than three elements and `m2` was read
    /// as `elements[2 mod len]`.
    pub wraparound: bool,
    /// (i) `m0` is odd.
    pub m0_odd: PropertyCheck,
    /// (ii) `m0 = 2k + 1`.
    pub m0_form: PropertyCheck,
    /// (iii) `m2 = 3k + (3 + r) / 2`; only meaningful for `q = 3`.
    pub m2_form: PropertyCheck,
    /// (iv) `m2` is odd.
    pub m2_odd: PropertyCheck,
    /// (v) every element returns to itself after `len` steps.
    pub periodic: PropertyCheck,
}

impl PropertyReport {
    pub fn checks(&self) -> [(&'static str, &PropertyCheck); 5] {
        [
            ("m0_odd", &self.m0_odd),
            ("m0_form", &self.m0_form),
            ("m2_form", &self.m2_form),
            ("m2_odd", &self.m2_odd),
            ("periodic", &self.periodic),
        ]
    }
}

pub fn check_preliminaries(mc: &MinNormalCycle) -> PropertyReport {
    let len = mc.len();
    let m0 = mc.min();
    let m2 = &mc.elements[2 % len];
    let wraparound = len < 3;
    let k = mc.k.clone();

    let m0_odd = PropertyCheck {
        verdict: Verdict::from_bool(m0.is_odd()),
        witness: Some(m0.clone()),
        detail: format!("m0 = {m0}"),
    };

    let m0_form = match &k {
        Some(k) => PropertyCheck {
            verdict: Verdict::Holds,
            witness: Some(k.clone()),
            detail: format!("m0 = 2*{k} + 1"),
        },
        None => PropertyCheck {
            verdict: Verdict::Fails,
            witness: Some(m0.clone()),
            detail: format!("m0 = {m0} is even"),
        },
    };

    let m2_form = match (&k, mc.map.q()) {
        (Some(k), 3) => {
            let expected = BigInt::from(3) * k.to_bigint() + BigInt::from((3 + mc.map.r()) / 2);
            PropertyCheck {
                verdict: Verdict::from_bool(expected == m2.to_bigint()),
                witness: Some(m2.clone()),
                detail: format!("m2 = {m2}, 3k + (3 + r)/2 = {expected}"),
            }
        }
        (None, _) => PropertyCheck {
            verdict: Verdict::NotApplicable,
            witness: None,
            detail: "m0 is even, k undefined".into(),
        },
        (Some(_), q) => PropertyCheck {
            verdict: Verdict::NotApplicable,
            witness: None,
            detail: format!("form of m2 is specific to q = 3 (q = {q})"),
        },
    };

    let m2_odd = PropertyCheck {
        verdict: Verdict::from_bool(m2.is_odd()),
        witness: Some(m2.clone()),
        detail: format!("m2 = {m2}"),
    };

    let broken = mc.elements.iter().find(|m| {
        iterate(m, len as u64, &mc.map).map_or(true, |back| &back != *m)
    });
    let periodic = PropertyCheck {
        verdict: Verdict::from_bool(broken.is_none()),
        witness: broken.cloned(),
        detail: format!("C^{len}(m) = m checked for all {len} elements"),
    };

    PropertyReport {
        k,
        m2: m2.clone(),
        wraparound,
        m0_odd,
        m0_form,
        m2_form,
        m2_odd,
        periodic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nats(vs: &[u64]) -> Vec<Nat> {
        vs.iter().copied().map(Nat::from).collect()
    }

    fn cycle(vs: &[u64], map: MapParams) -> Cycle {
        Cycle::new(nats(vs), map).unwrap()
    }

    #[test]
    fn cycle_validation() {
        let std = MapParams::standard();
        assert_eq!(Cycle::new(vec![], std.clone()), Err(CycleError::Empty));
        assert_eq!(
            Cycle::new(nats(&[4, 2]), std.clone()),
            Err(CycleError::NotClosed {
                index: 1,
                value: Nat::from(2u32)
            })
        );
        assert_eq!(
            Cycle::new(nats(&[1, 4, 2, 1, 4, 2]), std.clone()),
            Err(CycleError::Repeated(Nat::from(1u32)))
        );
        assert_eq!(Cycle::new(nats(&[0]), std), Err(CycleError::Zero));
    }

    #[test]
    fn detect_trivial_cycle() {
        let found = detect_cycle(&Nat::from(7u32), &MapParams::standard(), 1000, &Nat::from(1_000_000u32))
            .unwrap();
        assert_eq!(found.cycle().unwrap().elements(), nats(&[4, 2, 1]).as_slice());
    }

    #[test]
    fn detect_three_n_minus_one_cycle() {
        let found = detect_cycle(
            &Nat::from(5u32),
            &MapParams::three_n_minus_one(),
            1000,
            &Nat::from(1_000_000u32),
        )
        .unwrap();
        assert_eq!(found.cycle().unwrap().elements(), nats(&[5, 14, 7, 20, 10]).as_slice());
    }

    #[test]
    fn detect_caps_on_five_n_plus_one() {
        let res = detect_cycle(
            &Nat::from(7u32),
            &MapParams::five_n_plus_one(),
            100,
            &Nat::from(1_000_000_000u32),
        )
        .unwrap();
        assert!(matches!(res, CycleDetection::Capped { .. }));
        let res = detect_cycle(&Nat::from(7u32), &MapParams::five_n_plus_one(), 10_000, &Nat::from(1000u32))
            .unwrap();
        assert_eq!(res, CycleDetection::Capped { reason: CapReason::ValueCap });
    }

    #[test]
    fn detect_respects_exact_step_cap() {
        // 7 reaches 4 after 14 steps and repeats 4 at step 17
        let std = MapParams::standard();
        let cap = Nat::from(1000u32);
        assert!(detect_cycle(&Nat::from(7u32), &std, 17, &cap).unwrap().cycle().is_some());
        assert_eq!(
            detect_cycle(&Nat::from(7u32), &std, 16, &cap).unwrap(),
            CycleDetection::Capped { reason: CapReason::StepCap }
        );
    }

    #[test]
    fn normalize_examples() {
        let std = MapParams::standard();
        let mc = min_normalize(&cycle(&[4, 2, 1], std.clone()));
        assert_eq!(mc.elements(), nats(&[1, 4, 2]).as_slice());
        assert_eq!(mc.k(), Some(&Nat::zero()));
        assert_eq!(min_normalize(&mc.as_cycle()), mc);

        let mc = min_normalize(&cycle(&[14, 7, 20, 10, 5], MapParams::three_n_minus_one()));
        assert_eq!(mc.elements(), nats(&[5, 14, 7, 20, 10]).as_slice());
        assert_eq!(mc.k(), Some(&Nat::from(2u32)));
    }

    #[test]
    fn preliminaries_on_trivial_cycle() {
        let mc = MinNormalCycle::from_elements(nats(&[1, 4, 2]), MapParams::standard()).unwrap();
        let rep = check_preliminaries(&mc);
        assert_eq!(rep.k, Some(Nat::zero()));
        assert_eq!(rep.m0_odd.verdict, Verdict::Holds);
        assert_eq!(rep.m0_form.verdict, Verdict::Holds);
        assert_eq!(rep.m2_form.verdict, Verdict::Holds);
        assert_eq!(rep.m2_odd.verdict, Verdict::Fails);
        assert_eq!(rep.m2_odd.witness, Some(Nat::from(2u32)));
        assert_eq!(rep.periodic.verdict, Verdict::Holds);
        assert!(!rep.wraparound);
    }

    #[test]
    fn preliminaries_on_three_n_minus_one_cycle() {
        let mc = MinNormalCycle::from_elements(nats(&[5, 14, 7, 20, 10]), MapParams::three_n_minus_one())
            .unwrap();
        let rep = check_preliminaries(&mc);
        assert_eq!(rep.k, Some(Nat::from(2u32)));
        assert_eq!(rep.m2, Nat::from(7u32));
        for (name, check) in rep.checks() {
            assert_eq!(check.verdict, Verdict::Holds, "{name}");
        }
    }

    #[test]
    fn preliminaries_wraparound() {
        let mc = MinNormalCycle::from_elements(nats(&[1, 2]), MapParams::three_n_minus_one()).unwrap();
        let rep = check_preliminaries(&mc);
        assert!(rep.wraparound);
        assert_eq!(rep.m2, Nat::one());
        assert_eq!(rep.m0_odd.verdict, Verdict::Holds);
        assert_eq!(rep.m2_form.verdict, Verdict::Holds);
        assert_eq!(rep.m2_odd.verdict, Verdict::Holds);
        assert_eq!(rep.periodic.verdict, Verdict::Holds);
    }

    #[test]
    fn m2_form_not_applicable_for_q5() {
        let mc = MinNormalCycle::from_elements(nats(&[1, 6, 3, 16, 8, 4, 2]), MapParams::five_n_plus_one())
            .unwrap();
        let rep = check_preliminaries(&mc);
        assert_eq!(rep.m2_form.verdict, Verdict::NotApplicable);
        assert_eq!(rep.periodic.verdict, Verdict::Holds);
        assert_eq!(rep.m2_odd.verdict, Verdict::Holds);
    }
}
