//! Independent oracles shared by the integration suites. None of these call
//! into the code paths they are used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};

/// Single step on machine integers; `q * n + r` with signed `r`.
pub fn naive_step(n: u128, q: u128, r: i128) -> u128 {
    if n.is_multiple_of(2) {
        n / 2
    } else {
        ((q * n) as i128 + r) as u128
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveDetection {
    Cycle(Vec<u128>),
    StepCap,
    ValueCap,
}

/// Seen-set cycle detector: remembers every value with its index.
pub fn naive_detect(n: u128, q: u128, r: i128, step_cap: u64, value_cap: u128) -> NaiveDetection {
    if n > value_cap {
        return NaiveDetection::ValueCap;
    }
    let mut index: HashMap<u128, usize> = HashMap::new();
    let mut values = vec![n];
    index.insert(n, 0);
    let mut cur = n;
    for _ in 0..step_cap {
        cur = naive_step(cur, q, r);
        if let Some(&i) = index.get(&cur) {
            return NaiveDetection::Cycle(values[i..].to_vec());
        }
        if cur > value_cap {
            return NaiveDetection::ValueCap;
        }
        index.insert(cur, values.len());
        values.push(cur);
    }
    NaiveDetection::StepCap
}

/// Full standard-map trajectory to 1: (maximum value, number of steps).
pub fn naive_full_stats(seed: u64) -> (u128, u64) {
    let mut n = seed as u128;
    let mut peak = n;
    let mut steps = 0;
    while n != 1 {
        n = if n.is_multiple_of(2) { n / 2 } else { 3 * n + 1 };
        peak = peak.max(n);
        steps += 1;
    }
    (peak, steps)
}

/// (max excursion, argmax seed, max steps, argmax seed) over `1..=n`,
/// smallest seed on ties.
pub fn naive_range_stats(n_max: u64) -> (u128, u64, u64, u64) {
    let mut best = (0u128, 0u64, 0u64, 0u64);
    for seed in 1..=n_max {
        let (peak, steps) = naive_full_stats(seed);
        if seed == 1 || peak > best.0 {
            best.0 = peak;
            best.1 = seed;
        }
        if seed == 1 || steps > best.2 {
            best.2 = steps;
            best.3 = seed;
        }
    }
    best
}

/// Double loop over every `(x, y)` in bounds with `2^y - 3^x = c`.
pub fn brute_pow_gap(c: &BigInt, x_max: u64, y_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for x in 0..=x_max {
        let three = num_traits::pow(BigInt::from(3), x as usize);
        for y in 0..=y_max {
            let two = num_traits::pow(BigInt::from(2), y as usize);
            if &(two - &three) == c {
                out.push((x, y));
            }
        }
    }
    out
}

/// Brute-force signature of odd `m` on a cycle of `(q, r)`: walk single steps
/// once around, counting odd and even elements, then solve
/// `z = m * (2^y - q^x)` directly.
pub fn brute_signature(m: u128, q: u128, r: i128) -> (u64, u64, BigInt) {
    let (mut x, mut y) = (0u64, 0u64);
    let mut cur = m;
    loop {
        if cur % 2 == 1 {
            x += 1;
        } else {
            y += 1;
        }
        cur = naive_step(cur, q, r);
        if cur == m {
            break;
        }
    }
    let gap = num_traits::pow(BigInt::from(2), y as usize) - num_traits::pow(BigInt::from(q as u64), x as usize);
    (x, y, BigInt::from(BigUint::from(m)) * gap)
}
