//! Layer profiles: per-cardinality counts of present and missing sets.

use crate::binomial::binom;
use crate::{Family, Int};
use num_traits::Zero;

/// For each layer `t`, `f[t]` sets of size `t` are present and `y[t]` are
/// missing; `f[t] + y[t] = C(n,t)` always.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerProfile {
    pub n: u32,
    pub f: Vec<Int>,
    pub y: Vec<Int>,
}

pub fn layer_profile(family: &Family) -> LayerProfile {
    let n = family.n();
    let mut f = vec![Int::zero(); n as usize + 1];
    for s in family.iter() {
        f[s.len() as usize] += 1;
    }
    let y = (0..=n as i64)
        .map(|t| binom(n, t) - &f[t as usize])
        .collect();
    LayerProfile { n, f, y }
}

/// Per-k record for the geometric-progression inequality
/// `Σ_{j<k} C(n,j) < C(n,k)`.
#[derive(Clone, Debug)]
pub struct Eq005Row {
    pub k: i64,
    pub prefix_sum: Int,
    pub binom_k: Int,
    pub holds: bool,
}

/// Checks `Σ_{j<k} C(n,j) < C(n,k)` for every `1 ≤ k ≤ n/3`, exactly.
pub fn eq005_report(n: u32) -> Vec<Eq005Row> {
    let mut rows = Vec::new();
    let mut prefix = Int::from(0);
    for k in 1..=(n as i64 / 3) {
        prefix += binom(n, k - 1);
        let bk = binom(n, k);
        rows.push(Eq005Row { k, prefix_sum: prefix.clone(), holds: prefix < bk, binom_k: bk });
    }
    rows
}

pub fn eq005_holds(n: u32) -> bool {
    eq005_report(n).iter().all(|r| r.holds)
}
