//! Memoized exact binomial coefficients.
//!
//! The Pascal table is built once, on first access, up to `MAX_N = 200`.
//! `OnceLock` makes the initialization safe under concurrent first access;
//! afterwards the table is read-only.

use crate::{Error, Int, Result};
use num_traits::{One, Zero};
use std::sync::OnceLock;

pub const MAX_N: i64 = 200;

static TABLE: OnceLock<Vec<Vec<Int>>> = OnceLock::new();

fn table() -> &'static Vec<Vec<Int>> {
    TABLE.get_or_init(|| {
        let size = (MAX_N + 1) as usize;
        let mut rows: Vec<Vec<Int>> = Vec::with_capacity(size);
        for n in 0..size {
            let mut row = vec![Int::zero(); n + 1];
            row[0] = Int::one();
            row[n] = Int::one();
            for k in 1..n {
                row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// Exact `C(n, k)`; zero for `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> Result<Int> {
    if !(0..=MAX_N).contains(&n) {
        return Err(Error::BinomialRange(n));
    }
    if k < 0 || k > n {
        return Ok(Int::zero());
    }
    Ok(table()[n as usize][k as usize].clone())
}

/// `C(n, k)` for arguments known to be in range. Panics otherwise.
pub fn binom(n: u32, k: i64) -> Int {
    binomial(n as i64, k).expect("binomial out of range")
}

/// `Σ_{k=lo..=hi} C(n, k)` with exact arithmetic.
pub fn binom_sum(n: u32, lo: i64, hi: i64) -> Int {
    let mut total = Int::zero();
    let mut k = lo;
    while k <= hi {
        total += binom(n, k);
        k += 1;
    }
    total
}
