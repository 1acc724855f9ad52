//! Exceptional units of `Z/nZ`: residues `u` with `u` and `1 - u` both units.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::arith::Factorization;
use crate::error::{Error, Result};

/// Largest modulus [`enumerate_exunits`] will scan.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// The exceptional units modulo `n`, sorted ascending.
///
/// For `n = 1` the set is `{0}`: the zero ring has exactly one element and
/// the single empty-sum tuple is counted as one solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExUnitSet {
    n: u64,
    members: Vec<u64>,
}

impl ExUnitSet {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: u64) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    pub fn into_members(self) -> Vec<u64> {
        self.members
    }
}

/// Whether `u` (any integer) is an exceptional unit modulo `n`.
pub fn is_exunit(u: i128, n: u64) -> bool {
    if n == 1 {
        return true;
    }
    let u = u.rem_euclid(n as i128) as u64;
    let v = (1 + n - u) % n;
    u.gcd(&n) == 1 && v.gcd(&n) == 1
}

/// Scans `[0, n)` for exceptional units.
pub fn enumerate_exunits(n: u64) -> Result<ExUnitSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus n must be positive".into()));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::capacity(
            "exceptional-unit enumeration modulus",
            ENUMERATION_LIMIT as u128,
            n as u128,
        ));
    }
    if n == 1 {
        return Ok(ExUnitSet { n, members: vec![0] });
    }
    let members = (0..n).filter(|&u| is_exunit(u as i128, n)).collect();
    Ok(ExUnitSet { n, members })
}

/// Units of `Z/nZ` (with `{0}` for `n = 1`), subject to the same bound.
pub fn enumerate_units(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus n must be positive".into()));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::capacity(
            "unit enumeration modulus",
            ENUMERATION_LIMIT as u128,
            n as u128,
        ));
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    Ok((1..n).filter(|u| u.gcd(&n) == 1).collect())
}

/// `|Z_n**| = prod p^(s-1) (p - 2)` over the prime powers of `n`; zero for even `n`.
pub fn count_exunits(n: &Factorization) -> BigUint {
    n.factors()
        .iter()
        .fold(BigUint::one(), |acc, &(p, s)| acc * BigUint::from(p).pow(s - 1) * (p - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_exunits(5).unwrap().members(), &[2, 3, 4]);
        assert_eq!(enumerate_exunits(15).unwrap().members(), &[2, 8, 14]);
        assert!(enumerate_exunits(2).unwrap().is_empty());
        assert_eq!(enumerate_exunits(1).unwrap().members(), &[0]);
    }

    #[test]
    fn enumeration_bounds() {
        assert!(matches!(enumerate_exunits(ENUMERATION_LIMIT + 1), Err(Error::Capacity { .. })));
        assert!(enumerate_exunits(0).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_exunits(&factorize(15)), BigUint::from(3u32));
        assert_eq!(count_exunits(&factorize(4)), BigUint::ZERO);
        assert_eq!(count_exunits(&factorize(27)), BigUint::from(9u32));
        assert_eq!(count_exunits(&factorize(1)), BigUint::one());
    }

    #[test]
    fn count_matches_enumeration() {
        for n in 2..=10_000u64 {
            let set = enumerate_exunits(n).unwrap();
            assert_eq!(BigUint::from(set.len()), count_exunits(&factorize(n)), "n = {n}");
            if n % 2 == 0 {
                assert!(set.is_empty());
            }
            for &u in set.members() {
                assert!(u.gcd(&n) == 1 && ((1 + n - u) % n).gcd(&n) == 1);
            }
        }
    }

    #[test]
    fn count_is_multiplicative() {
        for a in 1..=500u64 {
            for b in (a..=500).step_by(7) {
                if a.gcd(&b) != 1 {
                    continue;
                }
                assert_eq!(
                    count_exunits(&factorize(a * b)),
                    count_exunits(&factorize(a)) * count_exunits(&factorize(b))
                );
            }
        }
    }

    #[test]
    fn units_of_small_moduli() {
        assert_eq!(enumerate_units(1).unwrap(), vec![0]);
        assert_eq!(enumerate_units(9).unwrap(), vec![1, 2, 4, 5, 7, 8]);
    }
}
