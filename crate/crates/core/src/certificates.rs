//! Linear-combination certificates over layer profiles.
//!
//! An atom is an inequality Σ coeff(i,t)·y_i^t ≥ rhs that is valid for every
//! cross partition-free triple (or t-pseudo partition-free family), where
//! y_i^t counts the t-sets missing from family i. Certificates are
//! nonnegative combinations of atoms; when every combined coefficient β(i,t)
//! stays ≤ 1, the combination turns into a cardinality bound. Atoms are
//! always built mechanically from their size triples — displayed, simplified
//! forms are never transcribed.

use crate::binomial::{binom, binom_sum};
use crate::profile::layer_profile;
use crate::{int, Error, Family, Int, Ratio, Result};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Coefficient map keyed by (family index ∈ 1..=3, layer).
pub type Coeffs = BTreeMap<(usize, i64), Ratio>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Eq1 { s: [i64; 3] },
    Eq13 { s: [i64; 3] },
    Eq19 { t: i64, s: [i64; 3] },
    Axiom { name: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityAtom {
    n: u32,
    coefficients: Coeffs,
    rhs: Ratio,
    provenance: Provenance,
}

impl InequalityAtom {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &Coeffs {
        &self.coefficients
    }

    pub fn rhs(&self) -> &Ratio {
        &self.rhs
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self.provenance, Provenance::Axiom { .. })
    }

    /// Σ coeff(i,t)·y_i^t for the given families (indexed from 1).
    pub fn evaluate(&self, families: &[&Family]) -> Result<Ratio> {
        let profiles: Vec<_> = families
            .iter()
            .map(|f| {
                if f.n() != self.n {
                    return Err(Error::MismatchedN(self.n, f.n()));
                }
                Ok(layer_profile(f))
            })
            .collect::<Result<_>>()?;
        let mut total = Ratio::zero();
        for (&(i, t), c) in &self.coefficients {
            let p = profiles.get(i - 1).ok_or_else(|| {
                Error::Precondition(format!("atom references family {i}, {} given", families.len()))
            })?;
            total += c * Ratio::from_integer(p.y[t as usize].clone());
        }
        Ok(total)
    }

    /// Whether the atom's inequality holds for the given families.
    pub fn holds(&self, families: &[&Family]) -> Result<bool> {
        Ok(self.evaluate(families)? >= self.rhs)
    }
}

fn inv_binom(n: u32, k: i64) -> Ratio {
    Ratio::new(Int::from(1), binom(n, k))
}

fn rat_binom(n: u32, k: i64) -> Ratio {
    Ratio::from_integer(binom(n, k))
}

fn add_coeff(coeffs: &mut Coeffs, family: usize, layer: i64, value: Ratio) {
    *coeffs.entry((family, layer)).or_insert_with(Ratio::zero) += value;
}

fn check_eq1_sizes(n: u32, s: [i64; 3]) -> Result<()> {
    if s.iter().any(|&x| x < 0) || s.iter().sum::<i64>() > n as i64 {
        return Err(Error::Precondition(format!(
            "eq1 needs s_i ≥ 0 with s1+s2+s3 ≤ n, got {s:?} for n={n}"
        )));
    }
    Ok(())
}

/// The three-family inequality for cross partition-free triples: family i
/// carries 1/C(n,s_i) on layer s_i and 1/C(n,s_{i+}+s_{i-}) on the layer
/// s_{i+}+s_{i-}; the right side is 2.
pub fn atom_eq1(n: u32, s1: i64, s2: i64, s3: i64) -> Result<InequalityAtom> {
    let s = [s1, s2, s3];
    check_eq1_sizes(n, s)?;
    let mut coefficients = Coeffs::new();
    for i in 0..3 {
        let pair = s[(i + 1) % 3] + s[(i + 2) % 3];
        add_coeff(&mut coefficients, i + 1, s[i], inv_binom(n, s[i]));
        add_coeff(&mut coefficients, i + 1, pair, inv_binom(n, pair));
    }
    Ok(InequalityAtom {
        n,
        coefficients,
        rhs: Ratio::from_integer(int(2)),
        provenance: Provenance::Eq1 { s },
    })
}

/// The symmetrized form: the sum of `atom_eq1` over the three cyclic
/// rotations of (s1,s2,s3), with right side 6.
pub fn atom_eq13(n: u32, s1: i64, s2: i64, s3: i64) -> Result<InequalityAtom> {
    let s = [s1, s2, s3];
    check_eq1_sizes(n, s)?;
    let mut coefficients = Coeffs::new();
    for rot in 0..3 {
        let r = [s[rot], s[(rot + 1) % 3], s[(rot + 2) % 3]];
        for (k, v) in atom_eq1(n, r[0], r[1], r[2])?.coefficients {
            add_coeff(&mut coefficients, k.0, k.1, v);
        }
    }
    Ok(InequalityAtom {
        n,
        coefficients,
        rhs: Ratio::from_integer(int(6)),
        provenance: Provenance::Eq13 { s },
    })
}

/// The single-family inequality for t-pseudo partition-free families:
/// 1/C(n,s_i) on layers s_i and n−s_i, right side 2; requires
/// s1+s2+s3 = n+t−1.
pub fn atom_eq19(n: u32, t: i64, s1: i64, s2: i64, s3: i64) -> Result<InequalityAtom> {
    let s = [s1, s2, s3];
    if t < 1 {
        return Err(Error::Precondition(format!("eq19 needs t ≥ 1, got {t}")));
    }
    if s.iter().any(|&x| x < 0 || x > n as i64) {
        return Err(Error::Precondition(format!("eq19 sizes {s:?} outside 0..={n}")));
    }
    if s.iter().sum::<i64>() != n as i64 + t - 1 {
        return Err(Error::Precondition(format!(
            "eq19 needs s1+s2+s3 = n+t-1 = {}, got {}",
            n as i64 + t - 1,
            s.iter().sum::<i64>()
        )));
    }
    let mut coefficients = Coeffs::new();
    for &si in &s {
        add_coeff(&mut coefficients, 1, si, inv_binom(n, si));
        add_coeff(&mut coefficients, 1, n as i64 - si, inv_binom(n, si));
    }
    Ok(InequalityAtom {
        n,
        coefficients,
        rhs: Ratio::from_integer(int(2)),
        provenance: Provenance::Eq19 { t, s },
    })
}

/// A passthrough inequality taken on trust; `combine` reports which axioms a
/// certificate depends on so their sources can be validated elsewhere.
pub fn atom_axiom(n: u32, coefficients: Coeffs, rhs: Ratio, name: &str) -> Result<InequalityAtom> {
    for (&(i, t), c) in &coefficients {
        if !(1..=3).contains(&i) || t < 0 || t > n as i64 {
            return Err(Error::Precondition(format!("axiom key ({i},{t}) out of range for n={n}")));
        }
        if *c < Ratio::zero() {
            return Err(Error::Precondition(format!("negative coefficient at ({i},{t})")));
        }
    }
    if rhs < Ratio::zero() {
        return Err(Error::Precondition("negative rhs".into()));
    }
    Ok(InequalityAtom {
        n,
        coefficients,
        rhs,
        provenance: Provenance::Axiom { name: name.to_string() },
    })
}

/// Folds a multi-family atom into a single-family one by identifying all
/// three families (the F_i := F specialization).
pub fn collapse(atom: &InequalityAtom) -> InequalityAtom {
    let mut coefficients = Coeffs::new();
    for (&(_, t), c) in &atom.coefficients {
        add_coeff(&mut coefficients, 1, t, c.clone());
    }
    InequalityAtom {
        n: atom.n,
        coefficients,
        rhs: atom.rhs.clone(),
        provenance: atom.provenance.clone(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Certificate {
    atoms: Vec<(InequalityAtom, Ratio)>,
}

impl Certificate {
    pub fn new() -> Self {
        Certificate { atoms: Vec::new() }
    }

    pub fn push(&mut self, atom: InequalityAtom, multiplier: Ratio) -> Result<()> {
        if multiplier < Ratio::zero() {
            return Err(Error::Precondition("negative multiplier".into()));
        }
        if let Some((first, _)) = self.atoms.first() {
            if first.n != atom.n {
                return Err(Error::MismatchedN(first.n, atom.n));
            }
        }
        self.atoms.push((atom, multiplier));
        Ok(())
    }

    pub fn atoms(&self) -> &[(InequalityAtom, Ratio)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// The exact weighted sum of a certificate's atoms.
#[derive(Clone, Debug)]
pub struct CoefficientVector {
    pub n: u32,
    pub beta: Coeffs,
    pub rhs_total: Ratio,
    /// Keys present in `beta` with value < 1 (untouched layers are trivially
    /// below 1 and not listed).
    pub strict_layers: BTreeSet<(usize, i64)>,
    /// Names of axiom atoms the certificate depends on.
    pub axioms: Vec<String>,
}

pub fn combine(cert: &Certificate) -> Result<CoefficientVector> {
    let (first, _) = cert
        .atoms
        .first()
        .ok_or_else(|| Error::Precondition("empty certificate".into()))?;
    let n = first.n;
    let mut beta = Coeffs::new();
    let mut rhs_total = Ratio::zero();
    let mut axioms = Vec::new();
    for (atom, mult) in &cert.atoms {
        if atom.n != n {
            return Err(Error::MismatchedN(n, atom.n));
        }
        if mult.is_zero() {
            continue;
        }
        for (&(i, t), c) in &atom.coefficients {
            add_coeff(&mut beta, i, t, mult * c);
        }
        rhs_total += mult * &atom.rhs;
        if let Provenance::Axiom { name } = &atom.provenance {
            if !axioms.contains(name) {
                axioms.push(name.clone());
            }
        }
    }
    let one = Ratio::one();
    let strict_layers = beta
        .iter()
        .filter(|(_, b)| **b < one)
        .map(|(&k, _)| k)
        .collect();
    Ok(CoefficientVector { n, beta, rhs_total, strict_layers, axioms })
}

#[derive(Clone, Debug)]
pub enum BoundOutcome {
    /// Σ_i |F_i| ≤ bound; any equality-attaining family is full on every
    /// strict layer.
    Valid { bound: Ratio, strict_layers: BTreeSet<(usize, i64)> },
    /// Some β exceeds 1, so no bound follows.
    Invalid { family: usize, layer: i64, beta: Ratio },
}

/// Turns β ≤ 1 into the cardinality bound familyCount·2^n − rhsTotal.
pub fn implied_bound(cv: &CoefficientVector, family_count: u32) -> BoundOutcome {
    let one = Ratio::one();
    for (&(i, t), b) in &cv.beta {
        if *b > one {
            return BoundOutcome::Invalid { family: i, layer: t, beta: b.clone() };
        }
    }
    let total = Ratio::from_integer(int(family_count as i64) * (Int::from(1) << cv.n));
    BoundOutcome::Valid {
        bound: total - &cv.rhs_total,
        strict_layers: cv.strict_layers.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinName {
    Table1,
    Clach3m2,
    Clach23m,
    Table3Pseudo,
}

impl BuiltinName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(BuiltinName::Table1),
            "clach_3m2" => Ok(BuiltinName::Clach3m2),
            "clach2_3m" => Ok(BuiltinName::Clach23m),
            "table3_pseudo" => Ok(BuiltinName::Table3Pseudo),
            _ => Err(Error::Precondition(format!("unknown certificate name {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinName::Table1 => "table1",
            BuiltinName::Clach3m2 => "clach_3m2",
            BuiltinName::Clach23m => "clach2_3m",
            BuiltinName::Table3Pseudo => "table3_pseudo",
        }
    }

    pub fn family_count(&self) -> u32 {
        match self {
            BuiltinName::Table1 | BuiltinName::Clach3m2 => 3,
            BuiltinName::Clach23m | BuiltinName::Table3Pseudo => 1,
        }
    }
}

fn eq2_axiom(m: i64) -> Result<InequalityAtom> {
    let n = (3 * m + 2) as u32;
    let half = Ratio::new(int(1), int(2));
    let three_quarters = Ratio::new(int(3), int(4));
    let mut coefficients = Coeffs::new();
    for i in 1..=3 {
        for (layer, c) in [
            (m - 1, Ratio::one()),
            (m, Ratio::one()),
            (m + 1, Ratio::one()),
            (m + 2, three_quarters.clone()),
            (m + 3, half.clone()),
            (2 * m - 2, half.clone()),
            (2 * m - 1, half.clone()),
            (2 * m, three_quarters.clone()),
            (2 * m + 1, Ratio::one()),
            (2 * m + 2, Ratio::one()),
            (2 * m + 3, Ratio::one()),
        ] {
            add_coeff(&mut coefficients, i, layer, c);
        }
    }
    let rhs = Ratio::from_integer(int(3))
        * (rat_binom(n, m - 1) + rat_binom(n, m) + rat_binom(n, 2 * m + 2) + rat_binom(n, 2 * m + 3));
    atom_axiom(n, coefficients, rhs, "eq2")
}

fn eq4_axiom(m: i64) -> Result<InequalityAtom> {
    let n = (3 * m) as u32;
    let mut coefficients = Coeffs::new();
    for (layer, c) in [
        (m - 2, Ratio::one()),
        (m - 1, Ratio::one()),
        (m, Ratio::one()),
        (m + 1, Ratio::one()),
        (m + 2, Ratio::new(int(1), int(2))),
        (m + 3, Ratio::new(int(1), int(3))),
        (2 * m - 2, Ratio::new(int(1), int(2))),
        (2 * m - 1, Ratio::new(int(6), int(7))),
        (2 * m, Ratio::one()),
        (2 * m + 1, Ratio::one()),
        (2 * m + 2, Ratio::one()),
        (2 * m + 3, Ratio::one()),
    ] {
        add_coeff(&mut coefficients, 1, layer, c);
    }
    let rhs = rat_binom(n, m - 2)
        + rat_binom(n, m - 1)
        + rat_binom(n, m)
        + rat_binom(n, 2 * m + 2)
        + rat_binom(n, 2 * m + 3);
    atom_axiom(n, coefficients, rhs, "eq4")
}

fn eq6_axiom(m: i64) -> Result<InequalityAtom> {
    let n = (3 * m) as u32;
    let mut coefficients = Coeffs::new();
    add_coeff(&mut coefficients, 1, m - 3, Ratio::one());
    add_coeff(&mut coefficients, 1, m + 2, rat_binom(n, m - 3) / rat_binom(n, m + 2));
    add_coeff(&mut coefficients, 1, 2 * m - 1, rat_binom(n, m - 3) / rat_binom(n, m + 1));
    atom_axiom(n, coefficients, rat_binom(n, m - 3), "eq6")
}

/// Assembles one of the four certificate families, atom by atom.
pub fn builtin(name: BuiltinName, m: i64, t: Option<i64>) -> Result<Certificate> {
    let mut cert = Certificate::new();
    match name {
        BuiltinName::Table1 => {
            if m < 2 {
                return Err(Error::Precondition(format!("table1 needs m ≥ 2, got {m}")));
            }
            let n = (3 * m + 1) as u32;
            cert.push(atom_eq13(n, m, m, m + 1)?, rat_binom(n, m) / Ratio::from_integer(int(2)))?;
            for j in 1..=m {
                cert.push(atom_eq13(n, m - j, m + 1, m + j)?, rat_binom(n, m - j))?;
            }
        }
        BuiltinName::Clach3m2 => {
            if m < 6 {
                return Err(Error::Precondition(format!("clach_3m2 needs m ≥ 6, got {m}")));
            }
            let n = (3 * m + 2) as u32;
            cert.push(eq2_axiom(m)?, Ratio::one())?;
            for s in 0..=m - 2 {
                cert.push(atom_eq13(n, s, m + 2, 2 * m - s)?, rat_binom(n, s))?;
            }
        }
        BuiltinName::Clach23m => {
            if m < 6 {
                return Err(Error::Precondition(format!("clach2_3m needs m ≥ 6, got {m}")));
            }
            let n = (3 * m) as u32;
            cert.push(eq4_axiom(m)?, Ratio::one())?;
            for s in 0..=m - 4 {
                cert.push(
                    collapse(&atom_eq1(n, s, m + 2, 2 * m - 2 - s)?),
                    rat_binom(n, s),
                )?;
            }
            cert.push(eq6_axiom(m)?, Ratio::one())?;
        }
        BuiltinName::Table3Pseudo => {
            let t = t.ok_or_else(|| Error::Precondition("table3_pseudo needs t".into()))?;
            if t < 1 || 8 * t > m {
                return Err(Error::Precondition(format!(
                    "table3_pseudo needs 1 ≤ t ≤ m/8, got m={m}, t={t}"
                )));
            }
            let n = (3 * m - t + 2) as u32;
            cert.push(
                atom_eq19(n, t, m, m, m + 1)?,
                rat_binom(n, m) / Ratio::from_integer(int(2)),
            )?;
            for j in 1..=m {
                cert.push(
                    atom_eq19(n, t, m - j, m + (j + 1) / 2, m + (j + 2) / 2)?,
                    rat_binom(n, m - j),
                )?;
            }
        }
    }
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyFailure {
    pub family: usize,
    pub layer: i64,
    pub beta: String,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub name: BuiltinName,
    pub m: i64,
    pub t: Option<i64>,
    pub n: u32,
    pub family_count: u32,
    pub cv: CoefficientVector,
    pub bound: Ratio,
    pub expected_bound: Ratio,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Combines a builtin and checks its β pattern and implied bound against the
/// expected closed forms, all exactly: β ≤ 1 everywhere, β = 1 off the
/// middle band, 0 < β < 1 on it, and the bound equals the binomial sum.
pub fn verify_builtin(name: BuiltinName, m: i64, t: Option<i64>) -> Result<VerifyReport> {
    let cert = builtin(name, m, t)?;
    let cv = combine(&cert)?;
    let n = cv.n as i64;
    let family_count = name.family_count();
    // (strict band, expected single-family share of the bound).
    let (band_lo, band_hi, expected_one) = match name {
        BuiltinName::Table1 => (m + 1, 2 * m, binom_sum(cv.n, m + 1, 2 * m + 1)),
        BuiltinName::Clach3m2 => (m + 2, 2 * m, binom_sum(cv.n, m + 1, 2 * m + 1)),
        BuiltinName::Clach23m => (m + 2, 2 * m - 1, binom_sum(cv.n, m + 1, 2 * m + 1)),
        BuiltinName::Table3Pseudo => {
            let t = t.unwrap();
            (m + 1, 2 * m - t + 1, binom_sum(cv.n, m + 1, 2 * m - t + 2))
        }
    };
    let expected_bound =
        Ratio::from_integer(int(family_count as i64)) * Ratio::from_integer(expected_one);
    let one = Ratio::one();
    let mut failures = Vec::new();
    for i in 1..=family_count as usize {
        for layer in 0..=n {
            let beta = cv.beta.get(&(i, layer)).cloned().unwrap_or_else(Ratio::zero);
            let fail = |reason: &str| VerifyFailure {
                family: i,
                layer,
                beta: beta.to_string(),
                reason: reason.to_string(),
            };
            if (band_lo..=band_hi).contains(&layer) {
                if beta >= one {
                    failures.push(fail("expected β < 1 on the strict band"));
                } else if beta.is_zero() {
                    failures.push(fail("expected β > 0 on the strict band"));
                }
            } else if beta != one {
                failures.push(fail("expected β = 1 off the strict band"));
            }
        }
    }
    let bound = match implied_bound(&cv, family_count) {
        BoundOutcome::Valid { bound, .. } => bound,
        BoundOutcome::Invalid { family, layer, beta } => {
            failures.push(VerifyFailure {
                family,
                layer,
                beta: beta.to_string(),
                reason: "β > 1".to_string(),
            });
            Ratio::zero()
        }
    };
    if failures.is_empty() && bound != expected_bound {
        failures.push(VerifyFailure {
            family: 0,
            layer: -1,
            beta: bound.to_string(),
            reason: format!("bound mismatch: expected {expected_bound}"),
        });
    }
    Ok(VerifyReport {
        name,
        m,
        t,
        n: cv.n,
        family_count,
        cv,
        bound,
        expected_bound,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::{
        is_cross_partition_free, is_partition_free, is_t_pseudo_partition_free, Quantifier,
    };
    use crate::ratio;
    use rand::{Rng, SeedableRng};

    fn key(i: usize, t: i64) -> (usize, i64) {
        (i, t)
    }

    #[test]
    fn eq1_structure() {
        let a = atom_eq1(19, 6, 6, 7).unwrap();
        assert_eq!(a.coefficients[&key(1, 6)], Ratio::new(int(1), binom(19, 6)));
        assert_eq!(a.coefficients[&key(1, 13)], Ratio::new(int(1), binom(19, 13)));
        assert_eq!(a.coefficients[&key(2, 6)], Ratio::new(int(1), binom(19, 6)));
        assert_eq!(a.coefficients[&key(3, 7)], Ratio::new(int(1), binom(19, 7)));
        assert_eq!(a.coefficients[&key(3, 12)], Ratio::new(int(1), binom(19, 12)));
        assert_eq!(*a.rhs(), ratio(2, 1));
        assert_eq!(a.coefficients.len(), 6);
    }

    #[test]
    fn eq1_degenerate_and_boundary() {
        let z = atom_eq1(9, 0, 0, 0).unwrap();
        assert_eq!(z.coefficients.len(), 3);
        for i in 1..=3 {
            assert_eq!(z.coefficients[&key(i, 0)], ratio(2, 1));
        }
        assert!(atom_eq1(9, 3, 3, 3).is_ok()); // s1+s2+s3 = n boundary
        assert!(atom_eq1(9, 3, 3, 4).is_err());
        assert!(atom_eq1(9, -1, 3, 3).is_err());
    }

    #[test]
    fn eq13_is_rotation_sum() {
        let a = atom_eq13(19, 6, 6, 7).unwrap();
        let mut sum = Coeffs::new();
        for (s1, s2, s3) in [(6, 6, 7), (6, 7, 6), (7, 6, 6)] {
            for (k, v) in atom_eq1(19, s1, s2, s3).unwrap().coefficients {
                add_coeff(&mut sum, k.0, k.1, v);
            }
        }
        assert_eq!(a.coefficients, sum);
        assert_eq!(*a.rhs(), ratio(6, 1));
        // Identical rows for all three families.
        let layers: Vec<Vec<(i64, Ratio)>> = (1..=3)
            .map(|i| {
                a.coefficients
                    .iter()
                    .filter(|((f, _), _)| *f == i)
                    .map(|((_, t), c)| (*t, c.clone()))
                    .collect()
            })
            .collect();
        assert_eq!(layers[0], layers[1]);
        assert_eq!(layers[1], layers[2]);
    }

    #[test]
    fn eq19_structure() {
        let a = atom_eq19(20, 3, 6, 7, 9).unwrap();
        let layers: Vec<i64> = a.coefficients.keys().map(|&(_, t)| t).collect();
        assert_eq!(layers, vec![6, 7, 9, 11, 13, 14]);
        assert!(a.coefficients.keys().all(|&(i, _)| i == 1));
        assert_eq!(a.coefficients[&key(1, 14)], Ratio::new(int(1), binom(20, 6)));
        assert_eq!(*a.rhs(), ratio(2, 1));
        assert!(atom_eq19(20, 3, 6, 7, 8).is_err());
        // t = 1 with s1+s2+s3 = n collapses to the single-family eq1 shape.
        let e19 = atom_eq19(12, 1, 3, 4, 5).unwrap();
        let e12 = collapse(&atom_eq1(12, 3, 4, 5).unwrap());
        assert_eq!(e19.coefficients, e12.coefficients);
        assert_eq!(e19.rhs(), e12.rhs());
    }

    #[test]
    fn axiom_validation() {
        let zero = atom_axiom(10, Coeffs::new(), Ratio::zero(), "inert").unwrap();
        assert!(zero.is_axiom());
        let mut bad = Coeffs::new();
        bad.insert((1, 2), ratio(-1, 2));
        assert!(atom_axiom(10, bad, Ratio::zero(), "bad").is_err());
    }

    #[test]
    fn combine_basics() {
        let a = atom_eq13(19, 6, 6, 7).unwrap();
        let mut c = Certificate::new();
        c.push(a.clone(), Ratio::one()).unwrap();
        let cv = combine(&c).unwrap();
        assert_eq!(cv.beta, a.coefficients);
        assert_eq!(cv.rhs_total, ratio(6, 1));
        assert!(cv.axioms.is_empty());
        // Zero multipliers contribute nothing.
        let mut c2 = Certificate::new();
        c2.push(a.clone(), Ratio::one()).unwrap();
        c2.push(atom_eq13(19, 1, 2, 3).unwrap(), Ratio::zero()).unwrap();
        assert_eq!(combine(&c2).unwrap().beta, cv.beta);
        // Mixed n rejected.
        let mut c3 = Certificate::new();
        c3.push(a, Ratio::one()).unwrap();
        assert!(c3.push(atom_eq13(16, 1, 2, 3).unwrap(), Ratio::one()).is_err());
        assert!(combine(&Certificate::new()).is_err());
    }

    #[test]
    fn combine_is_linear() {
        let a = atom_eq13(19, 5, 6, 7).unwrap();
        let b = atom_eq13(19, 2, 8, 9).unwrap();
        let mut c1 = Certificate::new();
        c1.push(a.clone(), ratio(3, 2)).unwrap();
        let mut c2 = Certificate::new();
        c2.push(b.clone(), ratio(5, 7)).unwrap();
        let mut c12 = Certificate::new();
        c12.push(a, ratio(3, 2)).unwrap();
        c12.push(b, ratio(5, 7)).unwrap();
        let (v1, v2, v12) = (combine(&c1).unwrap(), combine(&c2).unwrap(), combine(&c12).unwrap());
        let mut sum = v1.beta.clone();
        for (k, v) in v2.beta {
            add_coeff(&mut sum, k.0, k.1, v);
        }
        assert_eq!(v12.beta, sum);
        assert_eq!(v12.rhs_total, v1.rhs_total + v2.rhs_total);
    }

    #[test]
    fn table1_certificate() {
        assert_eq!(builtin(BuiltinName::Table1, 6, None).unwrap().len(), 7);
        assert!(builtin(BuiltinName::Table1, 1, None).is_err());
        for m in [2, 6, 10] {
            let r = verify_builtin(BuiltinName::Table1, m, None).unwrap();
            assert!(r.passed(), "m={m}: {:?}", r.failures);
            assert_eq!(
                r.bound,
                Ratio::from_integer(int(3) * binom_sum((3 * m + 1) as u32, m + 1, 2 * m + 1))
            );
        }
    }

    #[test]
    fn clach_3m2_certificate() {
        for m in [6, 8] {
            let r = verify_builtin(BuiltinName::Clach3m2, m, None).unwrap();
            assert!(r.passed(), "m={m}: {:?}", r.failures);
            assert_eq!(r.cv.axioms, vec!["eq2".to_string()]);
        }
        assert!(builtin(BuiltinName::Clach3m2, 5, None).is_err());
        // The eq2 right side equals 6[C(n,m-1)+C(n,m)] by complement symmetry.
        let m = 6;
        let n = (3 * m + 2) as u32;
        assert_eq!(
            *eq2_axiom(m).unwrap().rhs(),
            Ratio::from_integer(int(6) * (binom(n, m - 1) + binom(n, m)))
        );
    }

    #[test]
    fn clach2_3m_certificate() {
        for m in [6, 8] {
            let r = verify_builtin(BuiltinName::Clach23m, m, None).unwrap();
            assert!(r.passed(), "m={m}: {:?}", r.failures);
            assert_eq!(r.cv.axioms, vec!["eq4".to_string(), "eq6".to_string()]);
            assert_eq!(
                r.bound,
                Ratio::from_integer(binom_sum((3 * m) as u32, m + 1, 2 * m + 1))
            );
        }
    }

    #[test]
    fn table3_certificate() {
        for (m, t) in [(8, 1), (16, 2), (24, 3)] {
            let r = verify_builtin(BuiltinName::Table3Pseudo, m, Some(t)).unwrap();
            assert!(r.passed(), "m={m},t={t}: {:?}", r.failures);
        }
        // The paper's estimate chain caps β(m+1) at 3076/3375.
        let (m, t) = (16i64, 2i64);
        let cv = combine(&builtin(BuiltinName::Table3Pseudo, m, Some(t)).unwrap()).unwrap();
        assert!(cv.beta[&(1, m + 1)] < ratio(3076, 3375));
        assert!(builtin(BuiltinName::Table3Pseudo, 8, Some(2)).is_err());
        assert!(builtin(BuiltinName::Table3Pseudo, 8, None).is_err());
    }

    fn random_cross_free_triple(
        rng: &mut impl Rng,
        n: u32,
        max_len: usize,
    ) -> (Family, Family, Family) {
        let mut fams: Vec<Family> = (0..3)
            .map(|_| {
                let count = rng.gen_range(0..=max_len);
                let masks: Vec<u64> =
                    (0..count).map(|_| rng.gen::<u64>() & ((1u64 << n) - 1)).collect();
                Family::from_masks(n, masks).unwrap()
            })
            .collect();
        loop {
            match is_cross_partition_free(&fams[0], &fams[1], &fams[2]).unwrap() {
                Ok(()) => break,
                Err(w) => {
                    let pick = rng.gen_range(0..w.masks.len());
                    let fam = w.family_indices[pick] - 1;
                    let mask = w.masks[pick];
                    let kept: Vec<u64> =
                        fams[fam].masks().iter().copied().filter(|&m| m != mask).collect();
                    fams[fam] = Family::from_masks(n, kept).unwrap();
                }
            }
        }
        let mut it = fams.into_iter();
        (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
    }

    #[test]
    fn eq1_eq13_sound_on_random_triples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..150 {
            let n = rng.gen_range(3..=7u32);
            let (f1, f2, f3) = random_cross_free_triple(&mut rng, n, 50);
            let s1 = rng.gen_range(0..=n as i64);
            let s2 = rng.gen_range(0..=(n as i64 - s1));
            let s3 = rng.gen_range(0..=(n as i64 - s1 - s2));
            let fams = [&f1, &f2, &f3];
            assert!(atom_eq1(n, s1, s2, s3).unwrap().holds(&fams).unwrap());
            assert!(atom_eq13(n, s1, s2, s3).unwrap().holds(&fams).unwrap());
        }
    }

    #[test]
    fn eq12_sound_on_random_single_families() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..150 {
            let n = rng.gen_range(3..=7u32);
            let count = rng.gen_range(0..=60);
            let masks: Vec<u64> =
                (0..count).map(|_| rng.gen::<u64>() & ((1u64 << n) - 1)).collect();
            let mut f = Family::from_masks(n, masks).unwrap();
            while let Err(w) = is_partition_free(&f, Quantifier::Literal) {
                let mask = w.masks[rng.gen_range(0..3)];
                let kept: Vec<u64> = f.masks().iter().copied().filter(|&m| m != mask).collect();
                f = Family::from_masks(n, kept).unwrap();
            }
            let s1 = rng.gen_range(0..=n as i64);
            let s2 = rng.gen_range(0..=(n as i64 - s1));
            let s3 = rng.gen_range(0..=(n as i64 - s1 - s2));
            let atom = collapse(&atom_eq1(n, s1, s2, s3).unwrap());
            assert!(atom.holds(&[&f]).unwrap());
        }
    }

    #[test]
    fn eq19_sound_on_random_pseudo_families() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..150 {
            let n = rng.gen_range(4..=7u32);
            let t = rng.gen_range(1..=2i64);
            let count = rng.gen_range(0..=60);
            let masks: Vec<u64> =
                (0..count).map(|_| rng.gen::<u64>() & ((1u64 << n) - 1)).collect();
            let mut f = Family::from_masks(n, masks).unwrap();
            while let Err(w) = is_t_pseudo_partition_free(&f, t).unwrap() {
                let mask = w.masks[rng.gen_range(0..3)];
                let kept: Vec<u64> = f.masks().iter().copied().filter(|&m| m != mask).collect();
                f = Family::from_masks(n, kept).unwrap();
            }
            // Sample s with s1+s2+s3 = n+t-1 and every s_i ≥ t-1 (layer
            // validity range of the averaging argument).
            let total = n as i64 + t - 1;
            let lo = t - 1;
            let s1 = rng.gen_range(lo..=(total - 2 * lo).min(n as i64));
            let s2 = rng.gen_range(lo..=(total - s1 - lo).min(n as i64));
            let s3 = total - s1 - s2;
            if s3 < lo || s3 > n as i64 {
                continue;
            }
            assert!(atom_eq19(n, t, s1, s2, s3).unwrap().holds(&[&f]).unwrap());
        }
    }

    #[test]
    fn implied_bound_guard() {
        let mut coeffs = Coeffs::new();
        coeffs.insert((1, 3), ratio(5, 4));
        let atom = atom_axiom(8, coeffs, Ratio::zero(), "hot").unwrap();
        let mut cert = Certificate::new();
        cert.push(atom, Ratio::one()).unwrap();
        match implied_bound(&combine(&cert).unwrap(), 1) {
            BoundOutcome::Invalid { family: 1, layer: 3, beta } => {
                assert_eq!(beta, ratio(5, 4));
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }
}
