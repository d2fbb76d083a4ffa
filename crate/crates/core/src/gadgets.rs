//! Weighted gadget families, their forbidden-triple constraint systems,
//! trace evaluation, and the auxiliary bipartite cover graph.
//!
//! A gadget is a small weighted collection of concrete subsets of `[n]`
//! ("slots"), organized in three groups (one per family) or by cyclic
//! position. Its constraint set lists the slot triples that a (cross)
//! partition-free family can never contain simultaneously; the maximum
//! feasible trace weight then bounds the weight any such family can place
//! on the gadget's sets.

use crate::binomial::binom;
use crate::flow::BipartiteGraph;
use crate::{ratio, Error, Family, Ratio, Result, Subset};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    /// Three groups over `n = 3m+2`, five leftover elements.
    G3m2,
    /// Cyclic, single family, `n = 3m`.
    G3m,
    /// Three groups over an equipartition of `n = 3m`.
    Prop1,
}

impl GadgetKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "3m2" => Ok(GadgetKind::G3m2),
            "3m" => Ok(GadgetKind::G3m),
            "prop1" => Ok(GadgetKind::Prop1),
            other => Err(Error::Precondition(format!("unknown gadget kind `{other}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            GadgetKind::G3m2 => "3m2",
            GadgetKind::G3m => "3m",
            GadgetKind::Prop1 => "prop1",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Slot {
    pub id: usize,
    /// Group index 1..=3 for the cross gadgets, cyclic position for `G3m`.
    pub group: usize,
    pub label: String,
    pub layer: i64,
    pub set: Subset,
    pub weight: Ratio,
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub n: u32,
    pub m: i64,
    pub slots: Vec<Slot>,
    /// Normalization constants: per group (or position), the k-sets carry
    /// total weight `c_k · C(n,k)`.
    pub ck: BTreeMap<i64, Ratio>,
}

impl Gadget {
    pub fn family_count(&self) -> usize {
        match self.kind {
            GadgetKind::G3m => 1,
            _ => 3,
        }
    }

    fn push(&mut self, group: usize, label: String, set: Subset, weight: Ratio) {
        self.slots.push(Slot {
            id: self.slots.len(),
            group,
            label,
            layer: set.len() as i64,
            set,
            weight,
        });
    }

    fn slot_by_label(&self, group: usize, label: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.group == group && s.label == label)
    }
}

/// Forbidden slot triples: in each, one set is the disjoint union of the
/// other two, with the three slots in distinct groups for cross gadgets.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSet {
    pub triples: Vec<[usize; 3]>,
}

/// Membership pattern of concrete families on a gadget's slots.
#[derive(Clone, Debug)]
pub struct Trace {
    pub chosen: Vec<bool>,
}

fn c(n: u32, k: i64) -> Ratio {
    Ratio::from_integer(binom(n, k))
}

/// The `n = 3m+2` gadget: 3 groups × 19 slots over the canonical placement
/// with leftover `{1,…,5}` and the three (m−1)-blocks laid out consecutively.
pub fn build_3m2(m: i64) -> Result<Gadget> {
    if m < 6 {
        return Err(Error::Precondition(format!("3m2 gadget needs m ≥ 6, got {m}")));
    }
    let n = (3 * m + 2) as u32;
    if n > 64 {
        return Err(Error::GroundSetSize(n));
    }
    let mut ck = BTreeMap::new();
    for (k, r) in [
        (m - 1, ratio(1, 1)),
        (m, ratio(1, 1)),
        (m + 1, ratio(1, 1)),
        (m + 2, ratio(3, 4)),
        (m + 3, ratio(1, 2)),
        (2 * m - 2, ratio(1, 2)),
        (2 * m - 1, ratio(1, 2)),
        (2 * m, ratio(3, 4)),
        (2 * m + 1, ratio(1, 1)),
        (2 * m + 2, ratio(1, 1)),
        (2 * m + 3, ratio(1, 1)),
    ] {
        ck.insert(k, r);
    }
    let mut g = Gadget { kind: GadgetKind::G3m2, n, m, slots: Vec::new(), ck };

    // Block i holds the m−1 elements {6 + (i−1)(m−1), …, 5 + i(m−1)}.
    let block = |i: usize| -> Result<Subset> {
        let lo = 6 + (i as u32 - 1) * (m as u32 - 1);
        let els: Vec<u32> = (lo..lo + m as u32 - 1).collect();
        Subset::from_elements(n, &els)
    };
    let hm1: Vec<Subset> = (1..=3).map(block).collect::<Result<_>>()?;
    let hm: Vec<Subset> = (1..=3)
        .map(|i| Ok(hm1[i - 1].union(&Subset::from_elements(n, &[i as u32])?)))
        .collect::<Result<_>>()?;

    for i in 1..=3usize {
        let (j, k) = match i {
            1 => (2, 3),
            2 => (1, 3),
            _ => (1, 2),
        };
        let add = |s: &Subset, e: u32| s.union(&Subset::from_elements(n, &[e]).unwrap());
        g.push(i, format!("H^{}", m - 1), hm1[i - 1], c(n, m - 1));
        g.push(i, format!("H^{m}"), hm[i - 1], c(n, m));
        for x in [4u32, 5] {
            g.push(i, format!("H^{}({x})", m + 1), add(&hm[i - 1], x), c(n, m + 1) * ratio(1, 2));
        }
        for jj in [j, k] {
            for x in [4u32, 5] {
                g.push(
                    i,
                    format!("H^{}({jj},{x})", m + 2),
                    add(&add(&hm[i - 1], jj as u32), x),
                    c(n, m + 2) * ratio(3, 32),
                );
            }
        }
        let central = add(&add(&hm[i - 1], 4), 5);
        g.push(i, format!("H^{}", m + 2), central, c(n, m + 2) * ratio(3, 8));
        for jj in [j, k] {
            g.push(
                i,
                format!("H^{}({jj})", m + 3),
                add(&central, jj as u32),
                c(n, m + 3) * ratio(1, 4),
            );
        }
        g.push(
            i,
            format!("H^{}", 2 * m - 2),
            hm1[j - 1].union(&hm1[k - 1]),
            c(n, 2 * m - 2) * ratio(1, 2),
        );
        for (a, b) in [(j, k), (k, j)] {
            g.push(
                i,
                format!("H^{}({a})", 2 * m - 1),
                hm[a - 1].union(&hm1[b - 1]),
                c(n, 2 * m - 1) * ratio(1, 4),
            );
        }
        g.push(i, format!("H^{}", 2 * m), hm[j - 1].union(&hm[k - 1]), c(n, 2 * m) * ratio(3, 4));
        for (x, y) in [(4u32, 5u32), (5, 4)] {
            g.push(
                i,
                format!("H^{}({y})", 2 * m + 1),
                add(&hm[i - 1], x).complement(),
                c(n, 2 * m + 1) * ratio(1, 2),
            );
        }
        g.push(i, format!("H^{}", 2 * m + 2), hm[i - 1].complement(), c(n, 2 * m + 2));
        g.push(i, format!("H^{}", 2 * m + 3), hm1[i - 1].complement(), c(n, 2 * m + 3));
    }
    Ok(g)
}

/// The cyclic `n = 3m` gadget: 20 slots per position `x`, with `rotation`
/// shifting every set around the cycle for invariance spot-checks.
pub fn build_3m(m: i64, rotation: i64) -> Result<Gadget> {
    if m < 6 {
        return Err(Error::Precondition(format!("3m gadget needs m ≥ 6, got {m}")));
    }
    let n = (3 * m) as u32;
    if n > 64 {
        return Err(Error::GroundSetSize(n));
    }
    if !(0..n as i64).contains(&rotation) {
        return Err(Error::Precondition(format!("rotation {rotation} outside [0, {n})")));
    }
    let mut ck = BTreeMap::new();
    for (k, r) in [
        (m - 2, ratio(1, 1)),
        (m - 1, ratio(1, 1)),
        (m, ratio(1, 1)),
        (m + 1, ratio(1, 1)),
        (m + 2, ratio(1, 2)),
        (m + 3, ratio(1, 3)),
        (2 * m - 2, ratio(1, 2)),
        (2 * m - 1, ratio(6, 7)),
        (2 * m, ratio(1, 1)),
        (2 * m + 1, ratio(1, 1)),
        (2 * m + 2, ratio(1, 1)),
        (2 * m + 3, ratio(1, 1)),
    ] {
        ck.insert(k, r);
    }
    let mut g = Gadget { kind: GadgetKind::G3m, n, m, slots: Vec::new(), ck };

    let pos = |p: i64| -> u32 { ((p + rotation - 1).rem_euclid(n as i64) + 1) as u32 };
    // Inclusive cyclic interval [from, to]; empty when to < from.
    let interval = |from: i64, to: i64| -> Subset {
        let els: Vec<u32> = (from..=to).map(pos).collect();
        Subset::from_elements(n, &els).unwrap()
    };

    let sizes: Vec<i64> = (m - 2..=m + 1).chain(2 * m - 1..=2 * m + 3).collect();
    for x in 1..=n as i64 {
        let xg = x as usize;
        for &j in &sizes {
            let w = if j == m + 1 {
                c(n, m - 1) * ratio(2, 1)
            } else if j == 2 * m - 1 {
                c(n, 2 * m - 1) * ratio(2, 7)
            } else {
                c(n, j)
            };
            g.push(xg, format!("H^{j}"), interval(x - j + 1, x), w);
        }
        let w1 = c(n, m + 1) * ratio(m, 4 * m + 2);
        g.push(xg, format!("Hl^{}", m + 1), interval(x - 2 * m, x - m - 1).union(&interval(x, x)), w1.clone());
        g.push(xg, format!("Hr^{}", m + 1), interval(x - m + 1, x).union(&interval(x - 2 * m, x - 2 * m)), w1);
        for j in 2..=3i64 {
            let w = c(n, m + j) * ratio(1, 6);
            g.push(
                xg,
                format!("Hl^{}", m + j),
                interval(x - 2 * m - j + 1, x - m - 1).union(&interval(x, x)),
                w.clone(),
            );
            g.push(
                xg,
                format!("Hr^{}", m + j),
                interval(x - m + 2 - j, x).union(&interval(x - 2 * m - j + 1, x - 2 * m - j + 1)),
                w,
            );
        }
        g.push(
            xg,
            format!("Hs^{}", m + 2),
            interval(x - m + 1, x).union(&interval(x - 2 * m - 1, x - 2 * m)),
            c(n, m + 2) * ratio(1, 6),
        );
        let w = c(n, 2 * m - 2) * ratio(1, 4);
        g.push(
            xg,
            format!("Ha^{}", 2 * m - 2),
            interval(x - m + 1, x).union(&interval(x - 2 * m + 2, x - m - 1)),
            w.clone(),
        );
        g.push(
            xg,
            format!("Hb^{}", 2 * m - 2),
            interval(x - m + 2, x).union(&interval(x - 2 * m + 2, x - m)),
            w,
        );
        let w = c(n, 2 * m - 1) * ratio(2, 7);
        g.push(
            xg,
            format!("Hr^{}", 2 * m - 1),
            interval(x - m + 1, x).union(&interval(x - 2 * m + 1, x - m - 1)),
            w.clone(),
        );
        g.push(
            xg,
            format!("Hl^{}", 2 * m - 1),
            interval(x - m + 2, x).union(&interval(x - 2 * m + 1, x - m)),
            w,
        );
    }
    Ok(g)
}

/// The equipartition gadget for the cross bound: 3 groups × 7 slots over
/// `[3m] = H_1^m ⊔ H_2^m ⊔ H_3^m` with `i ∈ H_i^m`.
pub fn build_prop1(m: i64) -> Result<Gadget> {
    if m < 4 {
        return Err(Error::Precondition(format!("prop1 gadget needs m ≥ 4, got {m}")));
    }
    let n = (3 * m) as u32;
    if n > 64 {
        return Err(Error::GroundSetSize(n));
    }
    // Group i owns element i plus a block of m−1 consecutive spare elements.
    let hm: Vec<Subset> = (1..=3u32)
        .map(|i| {
            let lo = 4 + (i - 1) * (m as u32 - 1);
            let mut els: Vec<u32> = (lo..lo + m as u32 - 1).collect();
            els.push(i);
            Subset::from_elements(n, &els)
        })
        .collect::<Result<_>>()?;
    let hm1: Vec<Subset> = (1..=3usize)
        .map(|i| Ok(hm[i - 1].intersection(&Subset::from_elements(n, &[i as u32])?.complement())))
        .collect::<Result<_>>()?;

    let plus_one = c(n, m - 1) + Ratio::from_integer(1.into());
    let mut g = Gadget { kind: GadgetKind::Prop1, n, m, slots: Vec::new(), ck: BTreeMap::new() };
    for i in 1..=3usize {
        let (j, k) = match i {
            1 => (2, 3),
            2 => (1, 3),
            _ => (1, 2),
        };
        g.push(i, format!("H^{}", m - 1), hm1[i - 1], c(n, m - 1));
        g.push(i, format!("H^{m}"), hm[i - 1], c(n, m));
        for jj in [j, k] {
            g.push(
                i,
                format!("H^{}({jj})", m + 1),
                hm[i - 1].union(&Subset::from_elements(n, &[jj as u32])?),
                plus_one.clone(),
            );
        }
        g.push(i, format!("H^{}", 2 * m - 2), hm1[j - 1].union(&hm1[k - 1]), plus_one.clone());
        g.push(i, format!("H^{}", 2 * m), hm[j - 1].union(&hm[k - 1]), c(n, 2 * m));
        g.push(i, format!("H^{}", 2 * m + 1), hm1[i - 1].complement(), c(n, 2 * m + 1));
    }
    // The two unit bonuses make c_{m+1} and c_{2m−2} slightly exceed the
    // plain ratios; record the exact values.
    for k in [m - 1, m, 2 * m, 2 * m + 1] {
        g.ck.insert(k, ratio(1, 1));
    }
    g.ck.insert(m + 1, plus_one.clone() * ratio(2, 1) / c(n, m + 1));
    g.ck.insert(2 * m - 2, plus_one / c(n, 2 * m - 2));
    Ok(g)
}

/// Checks slot distinctness, the structural relations (complement pairs,
/// disjoint-union compositions, interval sizes), and every normalization
/// identity; reports the first violation.
pub fn validate(g: &Gadget) -> std::result::Result<(), String> {
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for s in &g.slots {
        if s.set.n() != g.n {
            return Err(format!("slot {} ({}) has wrong ground set", s.id, s.label));
        }
        if s.set.len() as i64 != s.layer {
            return Err(format!("slot {} ({}) has size {} ≠ layer {}", s.id, s.label, s.set.len(), s.layer));
        }
        if s.weight <= Ratio::zero() {
            return Err(format!("slot {} ({}) has non-positive weight", s.id, s.label));
        }
        if let Some(&other) = seen.get(&s.set.bits()) {
            return Err(format!("slots {other} and {} carry the same set {:?}", s.id, s.set));
        }
        seen.insert(s.set.bits(), s.id);
    }

    // Normalization: per group (or cyclic position) and layer.
    let mut sums: BTreeMap<(usize, i64), Ratio> = BTreeMap::new();
    for s in &g.slots {
        *sums.entry((s.group, s.layer)).or_insert_with(Ratio::zero) += &s.weight;
    }
    for ((group, layer), sum) in &sums {
        let Some(ck) = g.ck.get(layer) else {
            return Err(format!("no normalization constant for layer {layer}"));
        };
        let expect = ck * c(g.n, *layer);
        if *sum != expect {
            let s = g.slots.iter().find(|s| s.group == *group && s.layer == *layer).unwrap();
            return Err(format!(
                "group {group} layer {layer}: weights sum to {sum} ≠ {expect} (e.g. slot {} `{}`)",
                s.id, s.label
            ));
        }
    }

    let m = g.m;
    let relation = |group: usize, whole: &str, part_a: (usize, String), part_b: (usize, String)| {
        let w = g.slot_by_label(group, whole).ok_or(format!("missing slot {whole}"))?;
        let a = g.slot_by_label(part_a.0, &part_a.1).ok_or(format!("missing slot {}", part_a.1))?;
        let b = g.slot_by_label(part_b.0, &part_b.1).ok_or(format!("missing slot {}", part_b.1))?;
        match a.set.disjoint_union(&b.set) {
            Some(u) if u == w.set => Ok(()),
            _ => Err(format!("group {group}: `{whole}` is not `{}` ⊔ `{}`", part_a.1, part_b.1)),
        }
    };
    let complement_pair = |group: usize, big: &str, small: &str| {
        let b = g.slot_by_label(group, big).ok_or(format!("missing slot {big}"))?;
        let s = g.slot_by_label(group, small).ok_or(format!("missing slot {small}"))?;
        if b.set == s.set.complement() {
            Ok(())
        } else {
            Err(format!("group {group}: `{big}` is not the complement of `{small}`"))
        }
    };

    match g.kind {
        GadgetKind::G3m2 => {
            for i in 1..=3usize {
                let (j, k) = match i {
                    1 => (2, 3),
                    2 => (1, 3),
                    _ => (1, 2),
                };
                complement_pair(i, &format!("H^{}", 2 * m + 2), &format!("H^{m}"))?;
                complement_pair(i, &format!("H^{}", 2 * m + 3), &format!("H^{}", m - 1))?;
                for (x, y) in [(4, 5), (5, 4)] {
                    complement_pair(i, &format!("H^{}({y})", 2 * m + 1), &format!("H^{}({x})", m + 1))?;
                }
                relation(
                    i,
                    &format!("H^{}", 2 * m - 2),
                    (j, format!("H^{}", m - 1)),
                    (k, format!("H^{}", m - 1)),
                )?;
                relation(i, &format!("H^{}", 2 * m), (j, format!("H^{m}")), (k, format!("H^{m}")))?;
                for (a, b) in [(j, k), (k, j)] {
                    relation(
                        i,
                        &format!("H^{}({a})", 2 * m - 1),
                        (a, format!("H^{m}")),
                        (b, format!("H^{}", m - 1)),
                    )?;
                }
            }
        }
        GadgetKind::Prop1 => {
            for i in 1..=3usize {
                let (j, k) = match i {
                    1 => (2, 3),
                    2 => (1, 3),
                    _ => (1, 2),
                };
                complement_pair(i, &format!("H^{}", 2 * m + 1), &format!("H^{}", m - 1))?;
                relation(
                    i,
                    &format!("H^{}", 2 * m - 2),
                    (j, format!("H^{}", m - 1)),
                    (k, format!("H^{}", m - 1)),
                )?;
                relation(i, &format!("H^{}", 2 * m), (j, format!("H^{m}")), (k, format!("H^{m}")))?;
            }
        }
        GadgetKind::G3m => {
            let n = g.n as usize;
            let back = |x: usize, d: i64| -> usize {
                ((x as i64 - d - 1).rem_euclid(n as i64) + 1) as usize
            };
            for x in 1..=n {
                relation(
                    x,
                    &format!("H^{}", 2 * m),
                    (x, format!("H^{m}")),
                    (back(x, m), format!("H^{m}")),
                )?;
                relation(
                    x,
                    &format!("Ha^{}", 2 * m - 2),
                    (x, format!("H^{m}")),
                    (back(x, m + 1), format!("H^{}", m - 2)),
                )?;
                relation(
                    x,
                    &format!("Hb^{}", 2 * m - 2),
                    (x, format!("H^{}", m - 1)),
                    (back(x, m), format!("H^{}", m - 1)),
                )?;
                relation(
                    x,
                    &format!("Hr^{}", 2 * m - 1),
                    (x, format!("H^{m}")),
                    (back(x, m + 1), format!("H^{}", m - 1)),
                )?;
                relation(
                    x,
                    &format!("Hl^{}", 2 * m - 1),
                    (x, format!("H^{}", m - 1)),
                    (back(x, m), format!("H^{m}")),
                )?;
            }
        }
    }
    Ok(())
}

/// Exhaustive forbidden-triple enumeration. For cross gadgets the three
/// slots lie in pairwise distinct groups; for the cyclic gadget any slot
/// triple `{A, B, A ⊔ B}` qualifies.
pub fn constraints(g: &Gadget) -> ConstraintSet {
    let mut triples: Vec<[usize; 3]> = Vec::new();
    if g.family_count() == 3 {
        let by_group: Vec<Vec<&Slot>> = (1..=3)
            .map(|i| g.slots.iter().filter(|s| s.group == i).collect())
            .collect();
        let masks: Vec<BTreeMap<u64, usize>> = by_group
            .iter()
            .map(|slots| slots.iter().map(|s| (s.set.bits(), s.id)).collect())
            .collect();
        for (p, q, t) in [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
            for a in &by_group[p] {
                for b in &by_group[q] {
                    if !a.set.is_disjoint(&b.set) {
                        continue;
                    }
                    if let Some(&cid) = masks[t].get(&a.set.union(&b.set).bits()) {
                        let mut tr = [a.id, b.id, cid];
                        tr.sort_unstable();
                        triples.push(tr);
                    }
                }
            }
        }
    } else {
        let mask_map: BTreeMap<u64, usize> =
            g.slots.iter().map(|s| (s.set.bits(), s.id)).collect();
        for (ai, a) in g.slots.iter().enumerate() {
            for b in &g.slots[ai + 1..] {
                if !a.set.is_disjoint(&b.set) {
                    continue;
                }
                if let Some(&cid) = mask_map.get(&a.set.union(&b.set).bits()) {
                    let mut tr = [a.id, b.id, cid];
                    tr.sort_unstable();
                    triples.push(tr);
                }
            }
        }
    }
    triples.sort_unstable();
    triples.dedup();
    ConstraintSet { triples }
}

/// The weight a maximal feasible trace is expected to reach (for `prop1`,
/// instead the minimum weight a feasible trace must miss).
pub fn gadget_rhs(g: &Gadget) -> Ratio {
    let m = g.m;
    match g.kind {
        GadgetKind::G3m2 => {
            let mut total = Ratio::zero();
            for k in (m + 1..=m + 3).chain(2 * m - 2..=2 * m + 1) {
                total += g.ck[&k].clone() * c(g.n, k);
            }
            total * ratio(3, 1)
        }
        GadgetKind::G3m => {
            let mut total = Ratio::zero();
            for k in (m + 1..=m + 3).chain(2 * m - 2..=2 * m + 1) {
                total += g.ck[&k].clone() * c(g.n, k);
            }
            total * ratio(g.n as i64, 1)
        }
        GadgetKind::Prop1 => c(g.n, m) * ratio(2, 1) + c(g.n, m - 1) * ratio(5, 1),
    }
}

/// Marks each slot chosen iff its set belongs to the family of its group
/// (single family for the cyclic gadget).
pub fn trace_of(g: &Gadget, families: &[&Family]) -> Result<Trace> {
    if families.len() != g.family_count() {
        return Err(Error::Precondition(format!(
            "gadget expects {} families, got {}",
            g.family_count(),
            families.len()
        )));
    }
    for f in families {
        if f.n() != g.n {
            return Err(Error::MismatchedN(g.n, f.n()));
        }
    }
    let chosen = g
        .slots
        .iter()
        .map(|s| {
            let f = if g.family_count() == 1 { families[0] } else { families[s.group - 1] };
            f.contains_mask(s.set.bits())
        })
        .collect();
    Ok(Trace { chosen })
}

pub fn trace_weight(g: &Gadget, t: &Trace) -> Ratio {
    g.slots
        .iter()
        .zip(&t.chosen)
        .filter(|(_, &ch)| ch)
        .map(|(s, _)| s.weight.clone())
        .sum()
}

/// `Err` carries the first fully chosen forbidden triple.
pub fn trace_feasible(t: &Trace, cs: &ConstraintSet) -> std::result::Result<(), [usize; 3]> {
    for tr in &cs.triples {
        if tr.iter().all(|&i| t.chosen[i]) {
            return Err(*tr);
        }
    }
    Ok(())
}

/// The auxiliary bipartite graph of the cyclic discharging step: `U` holds
/// the `(2m+1)`-set positions touched by `A`, `V` the `(m+1)`-set vertices
/// that must absorb their charge.
#[derive(Clone, Debug)]
pub struct Step10Graph {
    pub m: i64,
    pub n: u32,
    pub a: usize,
    /// Left vertices are `U`, right vertices `V1 ∪ V2 ∪ V3`.
    pub graph: BipartiteGraph,
    pub u_positions: Vec<u32>,
    /// `(class, position)` with class 1 = left, 2 = right, 3 = central/interval.
    pub v_vertices: Vec<(u8, u32)>,
}

pub fn step10_graph(m: i64, a_positions: &[u32]) -> Result<Step10Graph> {
    if m < 2 {
        return Err(Error::Precondition(format!("step-10 graph needs m ≥ 2, got {m}")));
    }
    let n = (3 * m) as u32;
    if a_positions.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    let mut a_sorted: Vec<u32> = a_positions.to_vec();
    a_sorted.sort_unstable();
    a_sorted.dedup();
    if a_sorted.len() != a_positions.len() {
        return Err(Error::Precondition("duplicate positions in A".into()));
    }
    if a_sorted.iter().any(|&x| x == 0 || x > n) {
        return Err(Error::Precondition(format!("A has positions outside [1, {n}]")));
    }
    let shift = |x: u32, d: i64| -> u32 { ((x as i64 + d - 1).rem_euclid(n as i64) + 1) as u32 };
    for &x in &a_sorted {
        for &y in &a_sorted {
            if y == shift(x, m) || y == shift(x, 2 * m) {
                return Err(Error::Precondition(format!(
                    "positions {x} and {y} in A sit at circular distance m or 2m"
                )));
            }
        }
    }

    let mut u_positions: Vec<u32> = a_sorted
        .iter()
        .flat_map(|&x| [x, shift(x, 1), shift(x, m), shift(x, m + 1)])
        .collect();
    u_positions.sort_unstable();
    u_positions.dedup();
    let u_index: BTreeMap<u32, usize> =
        u_positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();

    let mut v_vertices: Vec<(u8, u32)> = Vec::new();
    let mut v3: Vec<u32> = a_sorted
        .iter()
        .flat_map(|&x| [shift(x, -m), shift(x, m + 1)])
        .collect();
    v3.sort_unstable();
    v3.dedup();
    for &x in &a_sorted {
        v_vertices.push((1, shift(x, 1)));
        v_vertices.push((2, shift(x, m)));
    }
    for &p in &v3 {
        v_vertices.push((3, p));
    }
    let v_index: BTreeMap<(u8, u32), usize> =
        v_vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut edges = Vec::new();
    for &x in &a_sorted {
        edges.push((u_index[&x], v_index[&(3, shift(x, -m))]));
        edges.push((u_index[&shift(x, 1)], v_index[&(1, shift(x, 1))]));
        edges.push((u_index[&shift(x, m)], v_index[&(2, shift(x, m))]));
        edges.push((u_index[&shift(x, m + 1)], v_index[&(3, shift(x, m + 1))]));
    }

    let w0 = c(n, m - 1);
    let w1 = c(n, m - 1) * ratio(m, m + 1);
    let mut degree = vec![0usize; v_vertices.len()];
    for &(_, v) in &edges {
        degree[v] += 1;
    }
    let right: Vec<Ratio> = v_vertices
        .iter()
        .zip(&degree)
        .map(|(&(class, _), &deg)| match class {
            3 if deg == 2 => c(n, m - 1) * ratio(2, 1),
            3 => c(n, m - 1) * ratio(2, 1) - c(n, m - 2),
            _ => w1.clone(),
        })
        .collect();
    let graph = BipartiteGraph { left: vec![w0; u_positions.len()], right, edges };
    Ok(Step10Graph { m, n, a: a_sorted.len(), graph, u_positions, v_vertices })
}

/// `(2a+1)·C(3m, m−1) ≥ a·C(3m, m)` for all `1 ≤ a ≤ m`.
pub fn eq15_holds(m: i64) -> bool {
    let n = (3 * m) as u32;
    (1..=m).all(|a| {
        c(n, m - 1) * ratio(2 * a + 1, 1) >= c(n, m) * ratio(a, 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example4_triple, kleitman_family, tilde_kx};
    use crate::flow::min_weight_vertex_cover;
    use crate::int;
    use rand::{Rng, SeedableRng};

    #[test]
    fn g3m2_structure() {
        let g = build_3m2(6).unwrap();
        assert_eq!(g.n, 20);
        assert_eq!(g.slots.len(), 57);
        assert_eq!(validate(&g), Ok(()));
        // Per-group (m+2)-weights: 3/8 + 4·(3/32) = 3/4 of C(20,8).
        let sum: Ratio = g
            .slots
            .iter()
            .filter(|s| s.group == 1 && s.layer == 8)
            .map(|s| s.weight.clone())
            .sum();
        assert_eq!(sum, c(20, 8) * ratio(3, 4));
        assert!(build_3m2(5).is_err());
        for m in [7, 10] {
            assert_eq!(validate(&build_3m2(m).unwrap()), Ok(()));
        }
    }

    #[test]
    fn g3m_structure() {
        let g = build_3m(6, 0).unwrap();
        assert_eq!(g.n, 18);
        assert_eq!(g.slots.len(), 360);
        assert_eq!(validate(&g), Ok(()));
        assert!(build_3m(5, 0).is_err());
        assert!(build_3m(6, 18).is_err());
        // Rotation invariance of validation and constraint count.
        let r = build_3m(6, 7).unwrap();
        assert_eq!(validate(&r), Ok(()));
        assert_eq!(constraints(&r).triples.len(), constraints(&g).triples.len());
        assert_eq!(validate(&build_3m(7, 3).unwrap()), Ok(()));
    }

    #[test]
    fn prop1_structure() {
        let g = build_prop1(4).unwrap();
        assert_eq!(g.slots.len(), 21);
        assert_eq!(validate(&g), Ok(()));
        let total: Ratio = g.slots.iter().map(|s| s.weight.clone()).sum();
        assert_eq!(total, Ratio::from_integer(int(6279)));
        for s in g.slots.iter().filter(|s| s.layer == 5) {
            assert_eq!(s.weight, Ratio::from_integer(int(221)));
        }
        assert!(build_prop1(3).is_err());
        assert_eq!(validate(&build_prop1(7).unwrap()), Ok(()));
    }

    #[test]
    fn perturbed_weight_fails_validation() {
        let mut g = build_3m2(6).unwrap();
        g.slots[3].weight += ratio(1, 1);
        let err = validate(&g).unwrap_err();
        assert!(err.contains("weights sum"), "{err}");
    }

    #[test]
    fn constraint_triples_verify() {
        for g in [build_3m2(6).unwrap(), build_prop1(4).unwrap(), build_3m(6, 0).unwrap()] {
            let cs = constraints(&g);
            assert!(!cs.triples.is_empty());
            for tr in &cs.triples {
                let sets: Vec<Subset> = tr.iter().map(|&i| g.slots[i].set).collect();
                let ok = (0..3).any(|u| {
                    let (a, b) = ((u + 1) % 3, (u + 2) % 3);
                    sets[a].disjoint_union(&sets[b]) == Some(sets[u])
                });
                assert!(ok, "triple {tr:?} has no disjoint-union relation");
                if g.family_count() == 3 {
                    let mut groups: Vec<usize> = tr.iter().map(|&i| g.slots[i].group).collect();
                    groups.sort_unstable();
                    assert_eq!(groups, vec![1, 2, 3]);
                }
            }
        }
    }

    #[test]
    fn prop1_emits_the_equipartition_triple() {
        let g = build_prop1(4).unwrap();
        let find = |group: usize, label: &str| g.slot_by_label(group, label).unwrap().id;
        let mut tr = [find(1, "H^8"), find(2, "H^4"), find(3, "H^4")];
        tr.sort_unstable();
        assert!(constraints(&g).triples.contains(&tr));
    }

    #[test]
    fn g3m_emits_adjacent_m_set_triples() {
        let g = build_3m(6, 0).unwrap();
        let cs = constraints(&g);
        for x in 1..=18usize {
            let back = ((x as i64 - 6 - 1).rem_euclid(18) + 1) as usize;
            let mut tr = [
                g.slot_by_label(x, "H^12").unwrap().id,
                g.slot_by_label(x, "H^6").unwrap().id,
                g.slot_by_label(back, "H^6").unwrap().id,
            ];
            tr.sort_unstable();
            assert!(cs.triples.contains(&tr));
        }
    }

    #[test]
    fn equality_traces() {
        // The symmetric maximizers hit the rhs exactly and stay feasible.
        let g = build_3m(6, 0).unwrap();
        let cs = constraints(&g);
        let k18 = kleitman_family(18).unwrap();
        let t = trace_of(&g, &[&k18]).unwrap();
        assert_eq!(trace_weight(&g, &t), gadget_rhs(&g));
        assert_eq!(trace_feasible(&t, &cs), Ok(()));

        let tilde = tilde_kx(18, 1).unwrap();
        let t = trace_of(&g, &[&tilde]).unwrap();
        assert_eq!(trace_weight(&g, &t), gadget_rhs(&g));
        assert_eq!(trace_feasible(&t, &cs), Ok(()));

        let g = build_3m2(6).unwrap();
        let cs = constraints(&g);
        let k20 = kleitman_family(20).unwrap();
        let t = trace_of(&g, &[&k20, &k20, &k20]).unwrap();
        assert_eq!(trace_weight(&g, &t), gadget_rhs(&g));
        assert_eq!(trace_feasible(&t, &cs), Ok(()));
    }

    #[test]
    fn prop1_equality_trace_misses_rhs() {
        let g = build_prop1(4).unwrap();
        let (a, b, c3) = example4_triple(4).unwrap();
        let t = trace_of(&g, &[&a, &b, &c3]).unwrap();
        let total: Ratio = g.slots.iter().map(|s| s.weight.clone()).sum();
        let missing = total - trace_weight(&g, &t);
        assert_eq!(missing, gadget_rhs(&g));
        assert_eq!(gadget_rhs(&g), Ratio::from_integer(int(2090)));
        assert_eq!(trace_feasible(&t, &constraints(&g)), Ok(()));
    }

    #[test]
    fn empty_trace() {
        let g = build_prop1(4).unwrap();
        let empty = Family::empty(12).unwrap();
        let t = trace_of(&g, &[&empty, &empty, &empty]).unwrap();
        assert!(trace_weight(&g, &t).is_zero());
        assert_eq!(trace_feasible(&t, &constraints(&g)), Ok(()));
        assert!(trace_of(&g, &[&empty]).is_err());
    }

    #[test]
    fn step10_invariants() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = 6i64;
        let n = 18u32;
        for _ in 0..100 {
            // ≤ 1 position per orbit {x, x+m, x+2m} keeps the distance
            // precondition automatically.
            let mut a = Vec::new();
            for x in 1..=m as u32 {
                match rng.gen_range(0..4) {
                    0 => a.push(x),
                    1 => a.push(x + m as u32),
                    2 => a.push(x + 2 * m as u32),
                    _ => {}
                }
            }
            if a.is_empty() {
                a.push(1);
            }
            let g = step10_graph(m, &a).unwrap();
            assert_eq!(g.graph.edges.len(), 4 * g.a);
            let mut deg_left = vec![0usize; g.graph.left.len()];
            let mut deg_right = vec![0usize; g.graph.right.len()];
            for &(u, v) in &g.graph.edges {
                deg_left[u] += 1;
                deg_right[v] += 1;
            }
            for (i, &(class, _)) in g.v_vertices.iter().enumerate() {
                match class {
                    1 | 2 => assert_eq!(deg_right[i], 1),
                    _ => assert!(deg_right[i] <= 2),
                }
            }
            assert!(deg_left.iter().all(|&d| d <= 2));
            assert!(g.u_positions.len() >= 2 * g.a + 1);
            // The cover bound of the discharging lemma.
            let (w, _) = min_weight_vertex_cover(&g.graph).unwrap();
            assert!(w >= c(n, m) * ratio(g.a as i64, 1));
        }
    }

    #[test]
    fn step10_interval_a() {
        let a: Vec<u32> = (1..=6).collect();
        let g = step10_graph(6, &a).unwrap();
        assert_eq!(g.u_positions.len(), 13); // 2m+1
        let (w, _) = min_weight_vertex_cover(&g.graph).unwrap();
        assert!(w >= c(18, 6) * ratio(6, 1));
        assert_eq!(c(18, 6), Ratio::from_integer(int(18564)));
    }

    #[test]
    fn step10_preconditions() {
        assert!(step10_graph(6, &[]).is_err());
        assert!(step10_graph(6, &[1, 7]).is_err()); // distance m
        assert!(step10_graph(6, &[1, 13]).is_err()); // distance 2m
        assert!(step10_graph(6, &[0]).is_err());
        assert!(step10_graph(6, &[1, 1]).is_err());
    }

    #[test]
    fn eq15_and_weight_gap() {
        for m in 1..=40 {
            assert!(eq15_holds(m), "eq15 fails at m={m}");
        }
        for m in 6..=20i64 {
            let n = (3 * m) as u32;
            let w0 = c(n, m - 1);
            let w1 = c(n, m - 1) * ratio(m, m + 1);
            assert!(w1 > w0 * ratio(5, 6));
        }
    }
}
