//! Exhaustive forbidden-configuration checkers with witness extraction.
//!
//! Quantifier semantics are literal: "there are no F0, F1, F2 ∈ F" allows
//! repetitions, which only matters when the empty set is a member. The
//! strict-distinct variant sits behind a flag for sensitivity experiments.

use crate::{Error, Family, Result, Subset};
use serde::Serialize;

/// An offending tuple; replaying it against the input reproduces the
/// violation.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub kind: String,
    pub sets: Vec<Vec<u32>>,
    /// Which family each set came from (1-based; all 1 for single-family
    /// checks).
    pub family_indices: Vec<usize>,
    #[serde(skip)]
    pub masks: Vec<u64>,
}

impl Witness {
    fn new(kind: &str, sets: &[Subset], family_indices: Vec<usize>) -> Self {
        Witness {
            kind: kind.to_string(),
            sets: sets.iter().map(|s| s.elements()).collect(),
            family_indices,
            masks: sets.iter().map(|s| s.bits()).collect(),
        }
    }
}

pub type CheckOutcome = std::result::Result<(), Witness>;

/// Distinctness flavor for the partition-free quantifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Quantifier {
    /// Repetitions allowed (the literal reading).
    #[default]
    Literal,
    /// F0, F1, F2 pairwise distinct.
    Distinct,
}

/// No `F0, F1, F2 ∈ F` with `F1 ∩ F2 = ∅` and `F0 = F1 ∪ F2`. On violation
/// returns the lexicographically smallest witness, ordered by the sorted
/// triple of masks.
pub fn is_partition_free(f: &Family, q: Quantifier) -> CheckOutcome {
    let masks = f.masks();
    let mut best: Option<(Vec<u64>, Witness)> = None;
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i..] {
            if a & b != 0 {
                continue;
            }
            let u = a | b;
            if !f.contains_mask(u) {
                continue;
            }
            if q == Quantifier::Distinct && (a == b || u == a || u == b) {
                continue;
            }
            let mut key = vec![u, a, b];
            key.sort_unstable();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                let n = f.n();
                let s = |m| Subset::new(n, m).unwrap();
                let w = Witness::new("partition", &[s(u), s(a), s(b)], vec![1, 1, 1]);
                best = Some((key, w));
            }
        }
    }
    match best {
        Some((_, w)) => Err(w),
        None => Ok(()),
    }
}

/// No `A ∈ F1, B ∈ F2, C ∈ F3` where one set equals the disjoint union of the
/// other two.
pub fn is_cross_partition_free(f1: &Family, f2: &Family, f3: &Family) -> Result<CheckOutcome> {
    let n = f1.n();
    if f2.n() != n || f3.n() != n {
        return Err(Error::MismatchedN(n, f2.n().max(f3.n())));
    }
    let s = |m| Subset::new(n, m).unwrap();
    let mut best: Option<(Vec<u64>, Witness)> = None;
    // (union-holder, part, part) over the three role assignments.
    let combos: [(&Family, &Family, &Family, [usize; 3]); 3] = [
        (f1, f2, f3, [1, 2, 3]), // A = B ⊔ C
        (f2, f1, f3, [2, 1, 3]), // B = A ⊔ C
        (f3, f1, f2, [3, 1, 2]), // C = A ⊔ B
    ];
    for (holder, p1, p2, idx) in combos {
        for &a in p1.masks() {
            for &b in p2.masks() {
                if a & b != 0 {
                    continue;
                }
                let u = a | b;
                if !holder.contains_mask(u) {
                    continue;
                }
                let mut key = vec![u, a, b];
                key.sort_unstable();
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    let w = Witness::new(
                        "cross-partition",
                        &[s(u), s(a), s(b)],
                        vec![idx[0], idx[1], idx[2]],
                    );
                    best = Some((key, w));
                }
            }
        }
    }
    Ok(match best {
        Some((_, w)) => Err(w),
        None => Ok(()),
    })
}

/// No `r` pairwise disjoint members whose union is also a member.
pub fn is_r_partition_free(f: &Family, r: usize) -> Result<CheckOutcome> {
    if r < 2 {
        return Err(Error::Precondition("r ≥ 2 required".into()));
    }
    let masks = f.masks();
    let n = f.n();
    let s = |m| Subset::new(n, m).unwrap();
    // DFS over members in mask order; prunes on total cardinality.
    fn dfs(
        masks: &[u64],
        f: &Family,
        n_bits: u32,
        start: usize,
        chosen: &mut Vec<u64>,
        acc: u64,
        remaining: usize,
    ) -> Option<Vec<u64>> {
        if remaining == 0 {
            if f.contains_mask(acc) {
                let mut w = chosen.clone();
                w.push(acc);
                return Some(w);
            }
            return None;
        }
        for i in start..masks.len() {
            let m = masks[i];
            if acc & m != 0 {
                continue;
            }
            if (acc | m).count_ones() > n_bits {
                continue;
            }
            chosen.push(m);
            if let Some(w) = dfs(masks, f, n_bits, i, chosen, acc | m, remaining - 1) {
                return Some(w);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    Ok(match dfs(masks, f, n, 0, &mut chosen, 0, r) {
        Some(w) => {
            let sets: Vec<Subset> = w.iter().map(|&m| s(m)).collect();
            Err(Witness::new("r-partition", &sets, vec![1; r + 1]))
        }
        None => Ok(()),
    })
}

/// Whether nonempty pairwise disjoint `B_1..B_r` exist with every nonempty
/// union of them a member. `allow_empty_blocks` relaxes the nonemptiness
/// interpretation.
pub fn contains_r_box(f: &Family, r: usize, allow_empty_blocks: bool) -> Result<CheckOutcome> {
    if !(2..=5).contains(&r) {
        return Err(Error::Precondition(format!("r-box needs 2 ≤ r ≤ 5, got {r}")));
    }
    let masks = f.masks();
    let n = f.n();
    // Every block is itself one of the 2^r - 1 unions, so blocks come from F.
    fn all_unions_present(f: &Family, blocks: &[u64]) -> bool {
        let r = blocks.len();
        for pattern in 1u32..(1 << r) {
            let mut u = 0u64;
            for (i, &b) in blocks.iter().enumerate() {
                if pattern & (1 << i) != 0 {
                    u |= b;
                }
            }
            if !f.contains_mask(u) {
                return false;
            }
        }
        true
    }
    fn dfs(
        f: &Family,
        masks: &[u64],
        start: usize,
        blocks: &mut Vec<u64>,
        acc: u64,
        remaining: usize,
        allow_empty: bool,
    ) -> bool {
        if remaining == 0 {
            return all_unions_present(f, blocks);
        }
        for i in start..masks.len() {
            let m = masks[i];
            if m == 0 && !allow_empty {
                continue;
            }
            if acc & m != 0 {
                continue;
            }
            blocks.push(m);
            if dfs(f, masks, i + 1, blocks, acc | m, remaining - 1, allow_empty) {
                return true;
            }
            blocks.pop();
        }
        false
    }
    let mut blocks = Vec::new();
    Ok(if dfs(f, masks, 0, &mut blocks, 0, r, allow_empty_blocks) {
        let s = |m| Subset::new(n, m).unwrap();
        let sets: Vec<Subset> = blocks.iter().map(|&m| s(m)).collect();
        Err(Witness::new("r-box", &sets, vec![1; r]))
    } else {
        Ok(())
    })
}

/// No `A, B, C ∈ F` with `A ∪ B = C` and `|A ∩ B| < t`.
pub fn is_t_pseudo_partition_free(f: &Family, t: i64) -> Result<CheckOutcome> {
    if t < 1 {
        return Err(Error::Precondition("t ≥ 1 required".into()));
    }
    let masks = f.masks();
    let n = f.n();
    let s = |m| Subset::new(n, m).unwrap();
    let mut best: Option<(Vec<u64>, Witness)> = None;
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i..] {
            if ((a & b).count_ones() as i64) >= t {
                continue;
            }
            let u = a | b;
            if !f.contains_mask(u) {
                continue;
            }
            let mut key = vec![u, a, b];
            key.sort_unstable();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                let w = Witness::new("t-pseudo-partition", &[s(a), s(b), s(u)], vec![1, 1, 1]);
                best = Some((key, w));
            }
        }
    }
    Ok(match best {
        Some((_, w)) => Err(w),
        None => Ok(()),
    })
}

/// Every pair `G1 × G2` meets.
pub fn are_cross_intersecting(g1: &Family, g2: &Family) -> bool {
    g1.masks()
        .iter()
        .all(|&a| g2.masks().iter().all(|&b| a & b != 0))
}

/// Asserts `|G1| + c|G2| ≤ max{C(n,t), (c+1)·C(n-1,t-1)}` for uniform
/// cross-intersecting `G1, G2` of common size `t`.
pub fn eq20_bound_check(g1: &Family, g2: &Family, c: &crate::Ratio) -> Result<bool> {
    use crate::binomial::binom;
    use num_traits::One;
    let n = g1.n();
    if g2.n() != n {
        return Err(Error::MismatchedN(n, g2.n()));
    }
    let t = match g1.iter().next().or_else(|| g2.iter().next()) {
        Some(s) => s.len() as i64,
        None => return Ok(true),
    };
    if !g1.iter().all(|s| s.len() as i64 == t) || !g2.iter().all(|s| s.len() as i64 == t) {
        return Err(Error::Precondition("eq20 needs uniform families".into()));
    }
    if (n as i64) < 2 * t || g1.len() < g2.len() || *c < crate::Ratio::one() {
        return Err(Error::Precondition(
            "eq20 needs n ≥ 2t, |G1| ≥ |G2|, c ≥ 1".into(),
        ));
    }
    let lhs = crate::Ratio::from_integer(crate::Int::from(g1.len() as i64))
        + c * crate::Ratio::from_integer(crate::Int::from(g2.len() as i64));
    let cap1 = crate::Ratio::from_integer(binom(n, t));
    let cap2 = (c + crate::Ratio::one())
        * crate::Ratio::from_integer(crate::binomial::binomial(n as i64 - 1, t - 1)?);
    Ok(lhs <= cap1.max(cap2))
}

/// Result of enumerating all 2^6 membership patterns of
/// `(S1∈F1, S2∈F2, S3∈F3, S2∪S3∈F1, S1∪S3∈F2, S1∪S2∈F3)` subject to the
/// three cross-partition constraints.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Claim1Report {
    pub max_memberships: u32,
    pub feasible_pattern_count: u32,
}

pub fn claim1_exhaustive() -> Claim1Report {
    // Slot order: s1, s2, s3, s2∪s3, s1∪s3, s1∪s2.
    const S1: u32 = 0;
    const S2: u32 = 1;
    const S3: u32 = 2;
    const U23: u32 = 3;
    const U13: u32 = 4;
    const U12: u32 = 5;
    // Constraint {S_i ∈ F_i, S_j ∈ F_j, S_i∪S_j ∈ F_k} for the rotations.
    let constraints = [[S1, S2, U12], [S2, S3, U23], [S3, S1, U13]];
    let mut max_memberships = 0;
    let mut feasible = 0;
    for pattern in 0u32..64 {
        let on = |slot: u32| pattern & (1 << slot) != 0;
        if constraints.iter().any(|c| c.iter().all(|&s| on(s))) {
            continue;
        }
        feasible += 1;
        max_memberships = max_memberships.max(pattern.count_ones());
    }
    Claim1Report { max_memberships, feasible_pattern_count: feasible }
}

/// Re-runs the violated configuration named by a witness against the inputs.
pub fn replay(witness: &Witness, families: &[&Family]) -> bool {
    let get = |i: usize| families[witness.family_indices[i] - 1];
    match witness.kind.as_str() {
        "partition" | "cross-partition" => {
            let u = witness.masks[0];
            let a = witness.masks[1];
            let b = witness.masks[2];
            a & b == 0
                && (a | b) == u
                && get(1).contains_mask(a)
                && get(2).contains_mask(b)
                && get(0).contains_mask(u)
        }
        "r-partition" => {
            let parts = &witness.masks[..witness.masks.len() - 1];
            let u = *witness.masks.last().unwrap();
            let mut acc = 0u64;
            for &p in parts {
                if acc & p != 0 {
                    return false;
                }
                acc |= p;
            }
            acc == u && witness.masks.iter().all(|&m| families[0].contains_mask(m))
        }
        "t-pseudo-partition" => {
            let a = witness.masks[0];
            let b = witness.masks[1];
            let u = witness.masks[2];
            (a | b) == u && witness.masks.iter().all(|&m| families[0].contains_mask(m))
        }
        "r-box" => {
            let blocks = &witness.masks;
            let mut acc = 0u64;
            for &b in blocks {
                if acc & b != 0 {
                    return false;
                }
                acc |= b;
            }
            (1u32..(1 << blocks.len())).all(|pat| {
                let mut u = 0u64;
                for (i, &b) in blocks.iter().enumerate() {
                    if pat & (1 << i) != 0 {
                        u |= b;
                    }
                }
                families[0].contains_mask(u)
            })
        }
        _ => false,
    }
}
