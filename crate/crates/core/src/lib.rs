//! Exact machinery for the Collatz function and generalized `qn + r` maps.
//!
//! The crate is layered bottom-up:
//!
//! * [`nat`] and [`collatz`]: arbitrary-precision naturals, map parameters,
//!   single steps, iterates, trajectories and 2-adic helpers.
//! * [`cycle`]: cycle detection, min-normal rotation and the structural
//!   property checks every min-normal cycle is subject to.
//! * [`decomposition`]: the per-element cycle signature `(x, y, profile, z)`
//!   with `m * (2^y - q^x) = z`.
//! * [`constraints`]: bounded power-gap enumeration (`2^y - 3^x = c`) and an
//!   exact replay of the identity chain built on signatures of `m0` and `m2`.
//! * [`search`]: parallel, deterministic range verification and cycle census.
//! * [`cli`]: the `collatz-lab` command-line front end.

pub mod cli;
pub mod collatz;
pub mod constraints;
pub mod cycle;
pub mod decomposition;
pub mod nat;
pub mod search;

pub use collatz::{
    iterate, odd_successor, step, trajectory, v2, DomainError, StopReason, TrajectoryRecord,
};
pub use constraints::{
    catalan_check, enumerate_pow_gap, replay_theorem, PowGapSolutionSet, TheoremError,
    TheoremReport, TheoremTuple,
};
pub use cycle::{
    check_preliminaries, detect_cycle, min_normalize, CapReason, Cycle, CycleDetection,
    CycleError, MinNormalCycle, PropertyReport, Verdict,
};
pub use decomposition::{decompose, signatures_for_cycle, verify_signature, CycleSignature, DecomposeError};
pub use nat::{MapError, MapParams, Nat};
pub use search::{find_cycles, verify_range, CycleSearchReport, RangeVerificationReport, SearchError};
