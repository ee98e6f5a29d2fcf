//! Arbitrary-precision naturals and generalized map parameters.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// A nonnegative integer of unbounded size.
///
/// Values serialize as decimal strings so that JSON consumers never lose
/// precision on large excursions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nat(BigUint);

impl Nat {
    pub fn zero() -> Self {
        Nat(BigUint::zero())
    }

    pub fn one() -> Self {
        Nat(BigUint::from(1u32))
    }

    /// `2^bits`.
    pub fn pow2(bits: u64) -> Self {
        let mut v = BigUint::zero();
        v.set_bit(bits, true);
        Nat(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0 == BigUint::from(1u32)
    }

    pub fn is_odd(&self) -> bool {
        self.0.is_odd()
    }

    pub fn is_even(&self) -> bool {
        self.0.is_even()
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    /// Converts a signed integer back into a natural, if it is nonnegative.
    pub fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_biguint().map(Nat)
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Self {
        Nat(v)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<u128> for Nat {
    fn from(v: u128) -> Self {
        Nat(BigUint::from(v))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Serializes signed integers as decimal strings.
pub(crate) fn serialize_bigint<S: Serializer>(v: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(v)
}

pub(crate) fn serialize_bigints<S: Serializer>(
    vs: &[BigInt],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(vs.iter().map(|v| v.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a decimal natural number: {0:?}")]
pub struct ParseNatError(String);

impl FromStr for Nat {
    type Err = ParseNatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseNatError(s.to_string()));
        }
        BigUint::parse_bytes(t.as_bytes(), 10)
            .map(Nat)
            .ok_or_else(|| ParseNatError(s.to_string()))
    }
}

impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("multiplier q = {0} must be odd and at least 3")]
    BadMultiplier(u64),
    #[error("addend r = {0} must be odd and nonzero")]
    BadAddend(i64),
    #[error("q + r = {0} must be at least 1 so positive integers map to positive integers")]
    NotPositive(i128),
    #[error("cannot parse map {0:?}; expected `q,r` or one of standard, 3n+1, 3n-1, 5n+1")]
    Parse(String),
}

/// A generalized Collatz map: `n / 2` on even `n`, `q * n + r` on odd `n`.
///
/// Both `q` and `r` are odd, so `q * n + r` is even for every odd `n` and each
/// odd step is followed by at least one halving.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MapParams {
    q: u64,
    r: i64,
    label: String,
}

impl MapParams {
    pub fn new(q: u64, r: i64) -> Result<Self, MapError> {
        let label = match (q, r) {
            (3, 1) => "standard".to_string(),
            (_, r) if r < 0 => format!("{q}n{r}"),
            _ => format!("{q}n+{r}"),
        };
        Self::with_label(q, r, label)
    }

    pub fn with_label(q: u64, r: i64, label: impl Into<String>) -> Result<Self, MapError> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(MapError::BadMultiplier(q));
        }
        if r % 2 == 0 {
            return Err(MapError::BadAddend(r));
        }
        let sum = q as i128 + r as i128;
        if sum < 1 {
            return Err(MapError::NotPositive(sum));
        }
        Ok(MapParams {
            q,
            r,
            label: label.into(),
        })
    }

    /// The Collatz function itself, `(3, 1)`.
    pub fn standard() -> Self {
        MapParams {
            q: 3,
            r: 1,
            label: "standard".into(),
        }
    }

    /// `(3, -1)`, which has three known cycles.
    pub fn three_n_minus_one() -> Self {
        MapParams {
            q: 3,
            r: -1,
            label: "3n-1".into(),
        }
    }

    /// `(5, 1)`, with three small cycles and apparently divergent orbits.
    pub fn five_n_plus_one() -> Self {
        MapParams {
            q: 5,
            r: 1,
            label: "5n+1".into(),
        }
    }

    pub fn presets() -> [MapParams; 3] {
        [
            Self::standard(),
            Self::three_n_minus_one(),
            Self::five_n_plus_one(),
        ]
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_standard(&self) -> bool {
        self.q == 3 && self.r == 1
    }

    /// `q * n + r`. Exact for every `n >= 1` because `q + r >= 1`.
    pub(crate) fn odd_image(&self, n: &BigUint) -> BigUint {
        let scaled = n * self.q;
        if self.r >= 0 {
            scaled + self.r.unsigned_abs()
        } else {
            scaled - self.r.unsigned_abs()
        }
    }
}

impl Default for MapParams {
    fn default() -> Self {
        Self::standard()
    }
}

impl fmt::Display for MapParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (q={}, r={})", self.label, self.q, self.r)
    }
}

impl FromStr for MapParams {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "standard" | "3n+1" => return Ok(Self::standard()),
            "3n-1" => return Ok(Self::three_n_minus_one()),
            "5n+1" => return Ok(Self::five_n_plus_one()),
            _ => {}
        }
        let (q, r) = t.split_once(',').ok_or_else(|| MapError::Parse(s.into()))?;
        let q = q.trim().parse().map_err(|_| MapError::Parse(s.into()))?;
        let r = r.trim().parse().map_err(|_| MapError::Parse(s.into()))?;
        Self::new(q, r)
    }
}
