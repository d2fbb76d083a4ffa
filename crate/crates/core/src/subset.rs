//! Bitmask subsets of `[n]` and deduplicated families.
//!
//! Elements are 1-based externally (matching `[n] = {1, …, n}`) and 0-based
//! in the mask. Ground sets are limited to `n ≤ 64` so that every subset is a
//! single machine word.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A subset of `[n]`, `1 ≤ n ≤ 64`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset {
    n: u32,
    bits: u64,
}

fn full_mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Subset {
    pub fn new(n: u32, bits: u64) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::GroundSetSize(n));
        }
        if bits & !full_mask(n) != 0 {
            return Err(Error::Precondition(format!(
                "mask {bits:#x} has elements outside [{n}]"
            )));
        }
        Ok(Subset { n, bits })
    }

    pub fn empty(n: u32) -> Result<Self> {
        Subset::new(n, 0)
    }

    /// Builds from 1-based elements.
    pub fn from_elements(n: u32, elements: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::Precondition(format!("element {e} outside [{n}]")));
            }
            bits |= 1u64 << (e - 1);
        }
        Subset::new(n, bits)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: u32) -> bool {
        element >= 1 && element <= self.n && self.bits & (1u64 << (element - 1)) != 0
    }

    /// Sorted, 1-based element list.
    pub fn elements(&self) -> Vec<u32> {
        (1..=self.n).filter(|&e| self.contains(e)).collect()
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.bits & other.bits == 0
    }

    pub fn union(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { n: self.n, bits: self.bits | other.bits }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset { n: self.n, bits: self.bits & other.bits }
    }

    /// Disjoint union; `None` when the sets meet.
    pub fn disjoint_union(&self, other: &Subset) -> Option<Subset> {
        if self.is_disjoint(other) {
            Some(self.union(other))
        } else {
            None
        }
    }

    pub fn complement(&self) -> Subset {
        Subset { n: self.n, bits: !self.bits & full_mask(self.n) }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits & !other.bits == 0
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A deduplicated collection of subsets over a common ground set, kept sorted
/// by mask for deterministic iteration.
#[derive(Clone, PartialEq, Eq)]
pub struct Family {
    n: u32,
    members: Vec<u64>,
}

impl Family {
    pub fn empty(n: u32) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::GroundSetSize(n));
        }
        Ok(Family { n, members: Vec::new() })
    }

    pub fn from_subsets<I: IntoIterator<Item = Subset>>(n: u32, subsets: I) -> Result<Self> {
        let mut members = Vec::new();
        for s in subsets {
            if s.n() != n {
                return Err(Error::MismatchedN(n, s.n()));
            }
            members.push(s.bits());
        }
        members.sort_unstable();
        members.dedup();
        if !(1..=64).contains(&n) {
            return Err(Error::GroundSetSize(n));
        }
        Ok(Family { n, members })
    }

    pub fn from_masks(n: u32, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        Family::from_subsets(
            n,
            masks
                .into_iter()
                .map(|m| Subset::new(n, m))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// All subsets of `[n]` with `lo ≤ |K| ≤ hi`.
    pub fn layer_band(n: u32, lo: i64, hi: i64) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::GroundSetSize(n));
        }
        if n > 24 {
            return Err(Error::Precondition(format!(
                "layer band enumeration over n={n} > 24 refused"
            )));
        }
        let mut members = Vec::new();
        for mask in 0..=full_mask(n) {
            let c = mask.count_ones() as i64;
            if c >= lo && c <= hi {
                members.push(mask);
            }
        }
        Ok(Family { n, members })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.n() == self.n && self.members.binary_search(&s.bits()).is_ok()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().map(|&m| Subset { n: self.n, bits: m })
    }

    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn insert(&mut self, s: Subset) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::MismatchedN(self.n, s.n()));
        }
        if let Err(pos) = self.members.binary_search(&s.bits()) {
            self.members.insert(pos, s.bits());
        }
        Ok(())
    }

    pub fn remove(&mut self, s: &Subset) {
        if let Ok(pos) = self.members.binary_search(&s.bits()) {
            self.members.remove(pos);
        }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, {} members)", self.n, self.members.len())
    }
}

/// Flat JSON form: `{"n": 6, "sets": [[1,2],[3,4,5]]}` with strictly
/// increasing inner arrays of 1-based elements.
#[derive(Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: u32,
    pub sets: Vec<Vec<u32>>,
}

impl Family {
    pub fn to_json(&self) -> FamilyJson {
        FamilyJson {
            n: self.n,
            sets: self.iter().map(|s| s.elements()).collect(),
        }
    }

    pub fn from_json(j: &FamilyJson) -> Result<Self> {
        let subsets = j
            .sets
            .iter()
            .map(|els| {
                if !els.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Precondition(format!(
                        "element list {els:?} is not strictly increasing"
                    )));
                }
                Subset::from_elements(j.n, els)
            })
            .collect::<Result<Vec<_>>>()?;
        Family::from_subsets(j.n, subsets)
    }

    pub fn read_json(reader: impl std::io::Read) -> Result<Self> {
        let j: FamilyJson = serde_json::from_reader(reader)?;
        Family::from_json(&j)
    }

    pub fn write_json(&self, writer: impl std::io::Write) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.to_json())?;
        Ok(())
    }
}
