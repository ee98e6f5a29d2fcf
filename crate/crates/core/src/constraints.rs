//! Power-gap enumeration and an exact replay of the identity chain that links
//! the signatures of `m0 = 2k + 1` and `m2 = 3k + 2` on a standard-map cycle.
//!
//! Nothing here asserts that a power gap has a unique solution; the
//! enumerators only report what exists inside the given bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::collatz::{iterate, DomainError};
use crate::cycle::{MinNormalCycle, Verdict};
use crate::decomposition::{decompose, pow, pow2, DecomposeError};
use crate::nat::{serialize_bigint, MapParams, Nat};

/// All `(x, y)` within bounds with `2^y - 3^x = c`, ascending by `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowGapSolutionSet {
    #[serde(serialize_with = "serialize_bigint")]
    pub c: BigInt,
    pub x_max: u64,
    pub y_max: u64,
    pub solutions: Vec<(u64, u64)>,
}

impl PowGapSolutionSet {
    /// The same set restricted to `x >= 1`.
    pub fn positive_x(&self) -> PowGapSolutionSet {
        PowGapSolutionSet {
            solutions: self.solutions.iter().copied().filter(|&(x, _)| x >= 1).collect(),
            ..self.clone()
        }
    }
}

/// Walks `x` upward and tests whether `3^x + c` is a power of two.
pub fn enumerate_pow_gap(c: &BigInt, x_max: u64, y_max: u64) -> PowGapSolutionSet {
    let mut solutions = Vec::new();
    let mut three_x = BigInt::one();
    for x in 0..=x_max {
        let target = &three_x + c;
        if let Some(y) = exact_log2(&target) {
            if y <= y_max {
                solutions.push((x, y));
            }
        }
        three_x *= 3;
    }
    PowGapSolutionSet {
        c: c.clone(),
        x_max,
        y_max,
        solutions,
    }
}

fn exact_log2(v: &BigInt) -> Option<u64> {
    if !v.is_positive() {
        return None;
    }
    let mag = v.magnitude();
    let tz = mag.trailing_zeros()?;
    (mag.bits() == tz + 1).then_some(tz)
}

/// Solutions of `3^x + 1 = 2^y` within bounds, found by walking `y` and
/// stripping factors of three from `2^y - 1`.
pub fn catalan_check(x_max: u64, y_max: u64) -> PowGapSolutionSet {
    let mut solutions = Vec::new();
    for y in 0..=y_max {
        let mut rest: BigInt = pow2(y) - 1;
        if rest.is_zero() {
            continue;
        }
        let mut x = 0u64;
        let three = BigInt::from(3);
        loop {
            let (q, r) = rest.div_rem(&three);
            if !r.is_zero() {
                break;
            }
            rest = q;
            x += 1;
        }
        if rest.is_one() && x <= x_max {
            solutions.push((x, y));
        }
    }
    solutions.sort_unstable();
    PowGapSolutionSet {
        c: BigInt::one(),
        x_max,
        y_max,
        solutions,
    }
}

/// The accumulators `(k, z0, z1)` on their own, so every line of the chain
/// can be probed on arbitrary values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremTuple {
    #[serde(serialize_with = "serialize_bigint")]
    pub k: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub z0: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub z1: BigInt,
}

impl TheoremTuple {
    pub fn new(k: impl Into<BigInt>, z0: impl Into<BigInt>, z1: impl Into<BigInt>) -> Self {
        TheoremTuple {
            k: k.into(),
            z0: z0.into(),
            z1: z1.into(),
        }
    }

    /// The case offset `n = 2 z0 - z1`.
    pub fn n_case(&self) -> BigInt {
        BigInt::from(2) * &self.z0 - &self.z1
    }

    /// `(2 z0 - z1) + k (3 z0 - 2 z1)`.
    pub fn residual(&self) -> BigInt {
        self.n_case() + &self.k * (BigInt::from(3) * &self.z0 - BigInt::from(2) * &self.z1)
    }

    /// `(k + 1) n - k (z0 - n)`.
    pub fn step_identity_gap(&self) -> BigInt {
        let n = self.n_case();
        (&self.k + 1) * &n - &self.k * (&self.z0 - &n)
    }

    pub fn z1_at_most_2z0(&self) -> bool {
        self.z1 <= BigInt::from(2) * &self.z0
    }

    pub fn residual_holds(&self) -> bool {
        self.residual().is_zero()
    }

    pub fn step_identity_holds(&self) -> bool {
        self.step_identity_gap().is_zero()
    }

    pub fn n_at_least_k(&self) -> bool {
        self.n_case() >= self.k
    }

    /// `k | n`, with `0 | n` only for `n = 0`.
    pub fn k_divides_n(&self) -> bool {
        let n = self.n_case();
        if self.k.is_zero() {
            n.is_zero()
        } else {
            n.is_multiple_of(&self.k)
        }
    }

    pub fn z0_above_2n(&self) -> bool {
        self.z0 > BigInt::from(2) * self.n_case()
    }

    pub fn z0_below_2n_plus_2(&self) -> bool {
        self.z0 < BigInt::from(2) * self.n_case() + 2
    }

    pub fn z0_is_2n_plus_1(&self) -> bool {
        self.z0 == BigInt::from(2) * self.n_case() + 1
    }

    fn lines(&self) -> Vec<TheoremLine> {
        vec![
            TheoremLine::new("z1_at_most_2z0", "z1 <= 2 z0", self.z1_at_most_2z0()),
            TheoremLine::new(
                "residual_zero",
                "(2 z0 - z1) + k (3 z0 - 2 z1) = 0",
                self.residual_holds(),
            ),
            TheoremLine::new("step_identity", "(k + 1) n = k (z0 - n)", self.step_identity_holds()),
            TheoremLine::new("n_at_least_k", "n >= k", self.n_at_least_k()),
            TheoremLine::new("k_divides_n", "k | n", self.k_divides_n()),
            TheoremLine::new("z0_above_2n", "z0 > 2n", self.z0_above_2n()),
            TheoremLine::new("z0_below_2n_plus_2", "z0 < 2n + 2", self.z0_below_2n_plus_2()),
            TheoremLine::new("z0_is_2n_plus_1", "z0 = 2n + 1", self.z0_is_2n_plus_1()),
        ]
    }
}

/// `q^x + z / m = 2^y`, cross-multiplied: `q^x m + z = 2^y m`.
pub fn rational_identity_holds(q: u64, x: u64, y: u64, m: &BigInt, z: &BigInt) -> bool {
    pow(q, x) * m + z == pow2(y) * m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremLine {
    pub name: &'static str,
    pub statement: &'static str,
    pub verdict: Verdict,
}

impl TheoremLine {
    fn new(name: &'static str, statement: &'static str, holds: bool) -> Self {
        TheoremLine {
            name,
            statement,
            verdict: Verdict::from_bool(holds),
        }
    }

    fn skipped(name: &'static str, statement: &'static str) -> Self {
        TheoremLine {
            name,
            statement,
            verdict: Verdict::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub m0: Nat,
    pub m2: Nat,
    pub k: Nat,
    pub x: u64,
    pub y: u64,
    #[serde(serialize_with = "serialize_bigint")]
    pub z0: BigInt,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub z1: Option<BigInt>,
    #[serde(serialize_with = "serialize_opt_bigint")]
    pub n_case: Option<BigInt>,
    /// Set when `m2` is even, which only the cycle `{1, 4, 2}` allows.
    pub trivial_cycle_flag: bool,
    pub lines: Vec<TheoremLine>,
}

fn serialize_opt_bigint<S: serde::Serializer>(
    v: &Option<BigInt>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serializer.collect_str(v),
        None => serializer.serialize_none(),
    }
}

impl TheoremReport {
    pub fn line(&self, name: &str) -> Option<&TheoremLine> {
        self.lines.iter().find(|l| l.name == name)
    }

    pub fn any_failed(&self) -> bool {
        self.lines.iter().any(|l| l.verdict == Verdict::Fails)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("the identity chain is stated for the standard map only (got {0})")]
    NotStandardMap(MapParams),
    #[error("the minimum element {0} is even")]
    EvenMinimum(Nat),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

impl From<DomainError> for TheoremError {
    fn from(e: DomainError) -> Self {
        TheoremError::Decompose(e.into())
    }
}

pub fn replay_theorem(mc: &MinNormalCycle, step_cap: u64) -> Result<TheoremReport, TheoremError> {
    if !mc.map().is_standard() {
        return Err(TheoremError::NotStandardMap(mc.map().clone()));
    }
    replay_theorem_at(mc.min(), step_cap)
}

/// Replays the chain for a claimed cycle minimum `m0` of the standard map,
/// with `m2 = C^2(m0)`. Inputs that are not on a cycle surface as
/// decomposition errors.
pub fn replay_theorem_at(m0: &Nat, step_cap: u64) -> Result<TheoremReport, TheoremError> {
    let map = MapParams::standard();
    if m0.is_zero() {
        return Err(DomainError::Zero.into());
    }
    if m0.is_even() {
        return Err(TheoremError::EvenMinimum(m0.clone()));
    }
    let k = Nat::from(m0.as_biguint() >> 1u32);
    let kb = k.to_bigint();
    let m2 = iterate(m0, 2, &map)?;

    let sig0 = decompose(m0, &map, step_cap)?;
    let (x, y) = (sig0.x, sig0.y);
    let z0 = sig0.z.clone();

    let mut lines = vec![TheoremLine::new(
        "rational_identity_m0",
        "3^x + z0 / (2k + 1) = 2^y",
        rational_identity_holds(3, x, y, &(BigInt::from(2) * &kb + 1), &z0),
    )];

    let trivial_cycle_flag = m2.is_even();
    let (z1, n_case) = if trivial_cycle_flag {
        lines.push(TheoremLine::skipped(
            "rational_identity_m2",
            "3^x + z1 / (3k + 2) = 2^y",
        ));
        for line in TheoremTuple::new(0, 0, 0).lines() {
            lines.push(TheoremLine::skipped(line.name, line.statement));
        }
        (None, None)
    } else {
        let sig1 = decompose(&m2, &map, step_cap)?;
        let z1 = sig1.z;
        // both signatures live on the same cycle, so (x, y) agree
        debug_assert_eq!((sig1.x, sig1.y), (x, y));
        lines.push(TheoremLine::new(
            "rational_identity_m2",
            "3^x + z1 / (3k + 2) = 2^y",
            rational_identity_holds(3, x, y, &(BigInt::from(3) * &kb + 2), &z1),
        ));
        let tuple = TheoremTuple {
            k: kb.clone(),
            z0: z0.clone(),
            z1: z1.clone(),
        };
        lines.extend(tuple.lines());
        (Some(z1), Some(tuple.n_case()))
    };

    let z0_is_m0 = z0 == m0.to_bigint();
    lines.push(TheoremLine::new("z0_equals_m0", "z0 = m0", z0_is_m0));
    lines.push(if z0_is_m0 {
        TheoremLine::new(
            "final_reduction",
            "3^x + 1 = 2^y",
            pow(3, x) + 1 == pow2(y),
        )
    } else {
        TheoremLine::skipped("final_reduction", "3^x + 1 = 2^y")
    });

    Ok(TheoremReport {
        m0: m0.clone(),
        m2,
        k,
        x,
        y,
        z0,
        z1,
        n_case,
        trivial_cycle_flag,
        lines,
    })
}
