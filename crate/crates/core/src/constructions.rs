//! Builders for the named families and their cardinality identities.

use crate::binomial::binom;
use crate::{Error, Family, Int, Ratio, Result};

/// The unique `m` with `n = 3m + l`, `0 ≤ l ≤ 2`.
pub fn band_m(n: u32) -> i64 {
    (n as i64) / 3
}

/// All subsets with `m+1 ≤ |K| ≤ 2m+1` where `n = 3m + l`.
pub fn kleitman_family(n: u32) -> Result<Family> {
    if n < 3 {
        return Err(Error::Precondition(format!("kleitman family needs n ≥ 3, got {n}")));
    }
    let m = band_m(n);
    Family::layer_band(n, m + 1, 2 * m + 1)
}

/// The double `F^d = {G ⊆ [n+1] : G ∩ [n] ∈ F}`; `|F^d| = 2|F|`.
pub fn double(f: &Family) -> Result<Family> {
    let n = f.n();
    if n >= 64 {
        return Err(Error::Precondition("no room to extend beyond n = 64".into()));
    }
    let top = 1u64 << n;
    let masks = f.masks().iter().flat_map(|&m| [m, m | top]).collect::<Vec<_>>();
    Family::from_masks(n + 1, masks)
}

/// `K(n)` plus all m-sets containing `x` minus all (2m+1)-sets containing `x`,
/// for `n = 3m`.
pub fn tilde_kx(n: u32, x: u32) -> Result<Family> {
    if n % 3 != 0 || n == 0 {
        return Err(Error::Precondition(format!("tilde-K needs n divisible by 3, got {n}")));
    }
    if x == 0 || x > n {
        return Err(Error::Precondition(format!("element {x} outside [{n}]")));
    }
    let m = (n / 3) as i64;
    let xbit = 1u64 << (x - 1);
    let mut masks: Vec<u64> = kleitman_family(n)?
        .masks()
        .iter()
        .copied()
        .filter(|mask| !(mask.count_ones() as i64 == 2 * m + 1 && mask & xbit != 0))
        .collect();
    for s in Family::layer_band(n, m, m)?.masks() {
        if s & xbit != 0 {
            masks.push(*s);
        }
    }
    Family::from_masks(n, masks)
}

/// Example 4: `A` is the band `[m, 2m+1]`, `B = C` the band `[m+1, 2m]`,
/// over `n = 3m`.
pub fn example4_triple(m: i64) -> Result<(Family, Family, Family)> {
    if m < 1 {
        return Err(Error::Precondition("example 4 needs m ≥ 1".into()));
    }
    let n = (3 * m) as u32;
    let a = Family::layer_band(n, m, 2 * m + 1)?;
    let b = Family::layer_band(n, m + 1, 2 * m)?;
    Ok((a, b.clone(), b))
}

/// `K(n,r)`: all sets with `m+1 ≤ |K| ≤ min(rm+r-1, n)` where `n = rm + q`,
/// `0 ≤ q < r`.
pub fn knr(n: u32, r: i64) -> Result<Family> {
    if r < 2 || (n as i64) < r {
        return Err(Error::Precondition(format!("knr needs r ≥ 2 and n ≥ r, got n={n}, r={r}")));
    }
    let m = n as i64 / r;
    let hi = (r * m + r - 1).min(n as i64);
    Family::layer_band(n, m + 1, hi)
}

/// All sets with `lo ≤ |K| ≤ hi`.
pub fn pseudo_family(n: u32, lo: i64, hi: i64) -> Result<Family> {
    if lo < 0 || lo > hi || hi > n as i64 {
        return Err(Error::Precondition(format!("bad band {lo}..={hi} for n={n}")));
    }
    Family::layer_band(n, lo, hi)
}

/// Convenience wrapper: the band `m ≤ |K| < 2m - s`, i.e. `lo = m`,
/// `hi = 2m - s - 1`.
pub fn pseudo_family_ms(n: u32, m: i64, s: i64) -> Result<Family> {
    pseudo_family(n, m, 2 * m - s - 1)
}

/// One row of the identity report.
#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub m: i64,
    pub name: &'static str,
    pub lhs: Ratio,
    pub rhs: Ratio,
    pub holds: bool,
}

fn row(m: i64, name: &'static str, lhs: Ratio, rhs: Ratio) -> IdentityRow {
    let holds = lhs == rhs;
    IdentityRow { m, name, lhs, rhs, holds }
}

fn int_ratio(i: Int) -> Ratio {
    Ratio::from_integer(i)
}

/// Checks, for every `m ≤ m_max`:
///  - doubling:  `2·Σ_{t=m+1}^{2m+1} C(3m+1,t) = Σ_{t=m+1}^{2m+1} C(3m+2,t)`
///  - symmetry:  `C(3m-1, m-1) = C(3m-1, 2m)`
///  - example 4: `C(3m, m) = ((2m+1)/m)·C(3m, 2m+1)`
pub fn construction_identities(m_max: i64) -> Result<Vec<IdentityRow>> {
    if m_max < 1 {
        return Err(Error::Precondition("m_max ≥ 1 required".into()));
    }
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let n1 = (3 * m + 1) as u32;
        let n2 = (3 * m + 2) as u32;
        let lhs: Int = (m + 1..=2 * m + 1).map(|t| binom(n1, t)).sum::<Int>() * 2;
        let rhs: Int = (m + 1..=2 * m + 1).map(|t| binom(n2, t)).sum();
        rows.push(row(m, "doubling", int_ratio(lhs), int_ratio(rhs)));

        let n0 = (3 * m - 1) as u32;
        rows.push(row(
            m,
            "binomial-symmetry",
            int_ratio(binom(n0, m - 1)),
            int_ratio(binom(n0, 2 * m)),
        ));

        let n3 = (3 * m) as u32;
        let lhs = int_ratio(binom(n3, m));
        let rhs = Ratio::new(Int::from(2 * m + 1), Int::from(m)) * int_ratio(binom(n3, 2 * m + 1));
        rows.push(row(m, "example4", lhs, rhs));
    }
    Ok(rows)
}

/// Identifier for the CLI `construct` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionId {
    Kleitman,
    Double,
    Tilde,
    Example4,
    Knr,
    Pseudo,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::binom_sum;
    use crate::int;
    use crate::Subset;

    #[test]
    fn kleitman_sizes() {
        assert_eq!(kleitman_family(7).unwrap().len(), 91); // 35+35+21
        assert_eq!(kleitman_family(4).unwrap().len(), 10); // 6+4
        assert_eq!(kleitman_family(6).unwrap().len(), 41);
        assert!(kleitman_family(2).is_err());
    }

    #[test]
    fn doubling() {
        let k7 = kleitman_family(7).unwrap();
        let d = double(&k7).unwrap();
        assert_eq!(d.len(), 182);
        assert_eq!(d.n(), 8);
        assert!(double(&Family::empty(5).unwrap()).unwrap().is_empty());
        // |double(K(3m+1))| = |K(3m+2)| at m = 2.
        assert_eq!(d.len(), kleitman_family(8).unwrap().len());
        assert_eq!(int(d.len() as i64), binom_sum(8, 3, 5));
    }

    #[test]
    fn tilde_matches_kleitman_size() {
        let t = tilde_kx(6, 1).unwrap();
        assert_eq!(t.len(), kleitman_family(6).unwrap().len());
        assert!(t.contains(&Subset::from_elements(6, &[1, 2]).unwrap()));
        assert!(!t.contains(&Subset::from_elements(6, &[1, 2, 3, 4, 5]).unwrap()));
        assert!(t.contains(&Subset::from_elements(6, &[2, 3, 4, 5, 6]).unwrap()));
        let t9 = tilde_kx(9, 3).unwrap();
        assert_eq!(t9.len(), 372);
        assert_eq!(int(t9.len() as i64), binom_sum(9, 4, 7));
        assert!(tilde_kx(7, 1).is_err());
    }

    #[test]
    fn example4_sizes() {
        let (a, b, c) = example4_triple(2).unwrap();
        assert_eq!(a.len(), 56);
        assert_eq!(b.len(), 35);
        assert_eq!(c.len(), 35);
        // total = 3|K(6)| + (1/m)·C(6,5) = 123 + 3
        assert_eq!(a.len() + b.len() + c.len(), 126);
        assert_eq!(
            3 * kleitman_family(6).unwrap().len() + 3,
            126
        );
    }

    #[test]
    fn knr_cases() {
        // r = 2 keeps the definitional m = floor(n/2); two disjoint sets of
        // size > m never fit inside [n], so the band is partition-free but is
        // a different (smaller) family than kleitman_family(n).
        let k = knr(6, 2).unwrap();
        assert_eq!(k, Family::layer_band(6, 4, 6).unwrap());
        assert_eq!(k.len(), 22);
        let f = knr(7, 3).unwrap();
        // n = 7 = 3·2+1: sizes 3..=min(8,7) = 3..=7
        assert!(f.iter().all(|s| (3..=7).contains(&s.len())));
        assert!(f.iter().any(|s| s.len() == 7));
    }

    #[test]
    fn pseudo_bands() {
        let f = pseudo_family(10, 3, 5).unwrap();
        assert_eq!(int(f.len() as i64), binom_sum(10, 3, 5));
        assert_eq!(f.len(), 582);
        let z = pseudo_family(5, 0, 0).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z.contains(&Subset::empty(5).unwrap()));
        let w = pseudo_family_ms(14, 4, 1).unwrap();
        assert!(w.iter().all(|s| (4..=6).contains(&s.len())));
        assert!(w.iter().any(|s| s.len() == 6));
    }

    #[test]
    fn identities_hold() {
        let rows = construction_identities(12).unwrap();
        assert_eq!(rows.len(), 36);
        assert!(rows.iter().all(|r| r.holds));
        // m=1 doubling: 2·(C(4,2)+C(4,3)) = C(5,2)+C(5,3) = 20.
        let r = &rows[0];
        assert_eq!(r.lhs, Ratio::from_integer(int(20)));
        // m=2: 182 = 182; C(5,1) = C(5,4) = 5; 15 = (5/2)·6.
        let m2: Vec<_> = rows.iter().filter(|r| r.m == 2).collect();
        assert_eq!(m2[0].lhs, Ratio::from_integer(int(182)));
        assert_eq!(m2[1].lhs, Ratio::from_integer(int(5)));
        assert_eq!(m2[2].lhs, Ratio::from_integer(int(15)));
    }
}
