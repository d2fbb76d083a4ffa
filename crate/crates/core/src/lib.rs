//! Exact-arithmetic machinery for partition-free set families.
//!
//! The crate builds the named extremal families, checks forbidden
//! configurations exhaustively, verifies linear-combination certificates over
//! layer profiles with big-rational arithmetic, constructs the weighted
//! gadget families together with their forbidden-triple constraint systems,
//! and optimizes over gadget traces exactly (branch-and-bound) or
//! heuristically (seeded local search). All weights and coefficients are
//! `BigRational`; there is no floating point anywhere in the verification
//! paths.

pub mod binomial;
pub mod certificates;
pub mod checkers;
pub mod constructions;
pub mod export;
pub mod flow;
pub mod gadgets;
pub mod profile;
pub mod report;
pub mod search;
pub mod subset;

pub use binomial::binomial;
pub use subset::{Family, Subset};

/// Exact scalar used for every weight, coefficient and bound.
pub type Ratio = num_rational::BigRational;
/// Arbitrary-precision integer backing [`Ratio`].
pub type Int = num_bigint::BigInt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set size {0} out of range (1..=64)")]
    GroundSetSize(u32),
    #[error("binomial argument n={0} out of supported range (0..=200)")]
    BinomialRange(i64),
    #[error("mismatched ground sets: {0} vs {1}")]
    MismatchedN(u32, u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Convenience constructor for exact integers.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Convenience constructor for exact rationals.
pub fn ratio(num: i64, den: i64) -> Ratio {
    Ratio::new(Int::from(num), Int::from(den))
}
