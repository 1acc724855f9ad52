//! Closed-form counts for `e = 2` and `e = 1`.
//!
//! Both are assembled multiplicatively: for `n = prod p^s`,
//!
//! ```text
//! N(n) = prod_p p^((k-1)(s-1)) * N(p)
//! ```
//!
//! and each local count `N(p)` is evaluated exactly in big integers. For
//! `e = 2` and an odd prime `p` the local count is split as
//!
//! ```text
//! p * N(p) = (p-2)^k - A + p*B + C
//! ```
//!
//! with `A`, `B`, `C` finite binomial sums weighted by `(-1)^((p-1)i/2) p^i`
//! (see [`PrimeLocalBreakdown`]). The division by `p` is checked to be exact
//! on every evaluation.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{binomial_row, factorize, is_prime, legendre_unchecked};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::query::{CongruenceQuery, Count};

/// Largest `k` the closed forms accept.
pub const K_LIMIT: u32 = 10_000;

/// Largest modulus [`distribution`] will tabulate.
pub const DISTRIBUTION_LIMIT: u64 = 1_000_000;

/// Per-prime evaluation record for `e = 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeLocalBreakdown {
    pub p: u64,
    pub k: u32,
    pub c_mod_p: u64,
    /// `(p - 2)^k`
    pub leading: BigInt,
    pub term_a: BigInt,
    pub term_b: BigInt,
    pub term_c: BigInt,
    pub local_count: Count,
}

impl PrimeLocalBreakdown {
    /// `(p-2)^k - A + p*B + C`, which must equal `p * local_count`.
    pub fn numerator(&self) -> BigInt {
        &self.leading - &self.term_a + BigInt::from(self.p) * &self.term_b + &self.term_c
    }

    /// The alternating-sign bracket `(-1)^k * numerator`; the local count is
    /// `(-1)^k * bracket / p`.
    pub fn bracket(&self) -> BigInt {
        sign_pow(self.k) * self.numerator()
    }

    pub fn identity_holds(&self) -> bool {
        self.numerator() == BigInt::from(self.p) * BigInt::from(self.local_count.clone())
    }
}

/// `(-1)^m`
fn sign_pow(m: u32) -> BigInt {
    if m.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `(-1)^((p-1)/2 * i)`, decided by parity only.
fn quadratic_sign(p: u64, i: u64) -> BigInt {
    if ((p - 1) / 2) % 2 == 1 && i % 2 == 1 {
        -BigInt::one()
    } else {
        BigInt::one()
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if k > K_LIMIT {
        return Err(Error::capacity("closed-form k", K_LIMIT as u128, k as u128));
    }
    Ok(())
}

/// For every row `m = 0..=k` of Pascal's triangle: the residue-class sum
/// `sum_{j = c (mod p)} C(m, j)` and the Legendre-weighted sum
/// `sum_j C(m, j) ((j - c)/p)`.
///
/// Rows are advanced through class sums `S(m, r)`, with
/// `S(m+1, r) = S(m, r) + S(m, r-1)`, kept over `min(p, k+1)` classes.
struct RowSums {
    selected: Vec<BigUint>,
    weighted: Vec<BigInt>,
}

impl RowSums {
    fn compute(p: u64, k: u32, c: u64) -> Self {
        let width = p.min(k as u64 + 1) as usize;
        let wraps = p <= k as u64 + 1;
        let legendre: Vec<i8> = (0..width)
            .map(|r| legendre_unchecked(r as i128 - c as i128, p))
            .collect();
        let mut classes = vec![BigUint::ZERO; width];
        classes[0] = BigUint::one();
        let mut selected = Vec::with_capacity(k as usize + 1);
        let mut weighted = Vec::with_capacity(k as usize + 1);
        for m in 0..=k {
            selected.push(if (c as usize) < width {
                classes[c as usize].clone()
            } else {
                BigUint::ZERO
            });
            let mut plus = BigUint::ZERO;
            let mut minus = BigUint::ZERO;
            for (s, &l) in classes.iter().zip(&legendre) {
                match l {
                    1 => plus += s,
                    -1 => minus += s,
                    _ => {}
                }
            }
            weighted.push(BigInt::from(plus) - BigInt::from(minus));
            if m == k {
                break;
            }
            let wrapped = wraps.then(|| classes[width - 1].clone());
            for r in (1..width).rev() {
                let (lo, hi) = classes.split_at_mut(r);
                hi[0] += &lo[r - 1];
            }
            if let Some(last) = wrapped {
                classes[0] += last;
            }
        }
        RowSums { selected, weighted }
    }
}

fn odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Evaluates the local count `N_{k,c,2}(p)` for an odd prime `p`, exposing
/// the `A`, `B`, `C` terms.
pub fn local_count_e2(p: u64, k: u32, c: i128) -> Result<PrimeLocalBreakdown> {
    odd_prime(p)?;
    check_k(k)?;
    let c = c.rem_euclid(p as i128) as u64;
    let sums = RowSums::compute(p, k, c);
    let row = binomial_row(k as u64);
    let pb = BigInt::from(p);
    let k64 = k as u64;

    let mut term_a = BigInt::zero();
    let mut term_b = BigInt::zero();
    let mut p_pow = BigInt::one();
    for i in 0..=k64 / 2 {
        let m = (k64 - 2 * i) as usize;
        let weight = quadratic_sign(p, i) * &p_pow * BigInt::from(row[2 * i as usize].clone());
        term_a += &weight << m;
        term_b += &weight * BigInt::from(sums.selected[m].clone());
        p_pow *= &pb;
    }
    term_a *= sign_pow(k);
    term_b *= sign_pow(k);

    let mut term_c = BigInt::zero();
    let mut p_pow = pb.clone();
    for i in 0..=(k64 - 1) / 2 {
        let m = (k64 - 2 * i - 1) as usize;
        let weight = quadratic_sign(p, i + 1) * &p_pow * BigInt::from(row[2 * i as usize + 1].clone());
        term_c += weight * &sums.weighted[m];
        p_pow *= &pb;
    }
    term_c *= sign_pow(k - 1);

    let leading = BigInt::from(p - 2).pow(k);
    let numerator = &leading - &term_a + &pb * &term_b + &term_c;
    let (quotient, rem) = numerator.div_rem(&pb);
    if !rem.is_zero() {
        return Err(Error::Invariant(format!(
            "local count numerator for p={p}, k={k}, c={c} is not divisible by p"
        )));
    }
    if quotient.is_negative() || quotient > leading {
        return Err(Error::Invariant(format!(
            "local count for p={p}, k={k}, c={c} is {quotient}, outside [0, (p-2)^k]"
        )));
    }
    Ok(PrimeLocalBreakdown {
        p,
        k,
        c_mod_p: c,
        leading,
        term_a,
        term_b,
        term_c,
        local_count: quotient.to_biguint().expect("nonnegative"),
    })
}

/// Local count `N_{k,c,1}(p)` for any prime `p`:
/// `(-1)^k / p * (p * sum_{j = c (mod p)} C(k, j) + (2 - p)^k - 2^k)`.
pub fn local_count_e1(p: u64, k: u32, c: i128) -> Result<Count> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    check_k(k)?;
    let c = c.rem_euclid(p as i128) as u64;
    let row = binomial_row(k as u64);
    let mut class_sum = BigUint::ZERO;
    let mut j = c;
    while j <= k as u64 {
        class_sum += &row[j as usize];
        j = match j.checked_add(p) {
            Some(next) => next,
            None => break,
        };
    }
    let pb = BigInt::from(p);
    let bracket = &pb * BigInt::from(class_sum) + (BigInt::from(2) - &pb).pow(k)
        - (BigInt::one() << k as usize);
    let (quotient, rem) = (sign_pow(k) * bracket).div_rem(&pb);
    if !rem.is_zero() || quotient.is_negative() {
        return Err(Error::Invariant(format!(
            "linear local count for p={p}, k={k}, c={c} is not a nonnegative integer"
        )));
    }
    Ok(quotient.to_biguint().expect("nonnegative"))
}

fn expect_exponent(q: &CongruenceQuery, e: u32) -> Result<()> {
    if q.e() != e {
        return Err(Error::InvalidArgument(format!(
            "query has e = {}, expected e = {e}",
            q.e()
        )));
    }
    Ok(())
}

/// Per-prime breakdowns for an odd modulus, with each prime's exponent.
pub fn breakdown_e2(q: &CongruenceQuery) -> Result<Vec<(PrimeLocalBreakdown, u32)>> {
    expect_exponent(q, 2)?;
    check_k(q.k())?;
    if q.n().is_multiple_of(2) {
        return Err(Error::InvalidArgument("breakdown needs an odd modulus".into()));
    }
    factorize(q.n())
        .factors()
        .iter()
        .map(|&(p, s)| Ok((local_count_e2(p, q.k(), q.c() as i128)?, s)))
        .collect()
}

fn assemble<F>(q: &CongruenceQuery, exec: Exec, local: F) -> Result<Count>
where
    F: Fn(u64) -> Result<Count> + Sync + Send,
{
    check_k(q.k())?;
    let factors = factorize(q.n()).factors().to_vec();
    let k = q.k();
    let parts = exec.try_map(factors, |(p, s)| {
        Ok::<_, Error>(local(p)? * BigUint::from(p).pow((k - 1) * (s - 1)))
    })?;
    Ok(parts.into_iter().fold(BigUint::one(), |acc, x| acc * x))
}

/// `N_{k,c,2}(n)`: zero for even `n`, otherwise the product of lifted local counts.
pub fn count_e2(q: &CongruenceQuery) -> Result<Count> {
    count_e2_with(q, Exec::default())
}

pub fn count_e2_with(q: &CongruenceQuery, exec: Exec) -> Result<Count> {
    expect_exponent(q, 2)?;
    check_k(q.k())?;
    if q.n().is_multiple_of(2) {
        return Ok(BigUint::ZERO);
    }
    let (k, c) = (q.k(), q.c() as i128);
    assemble(q, exec, |p| Ok(local_count_e2(p, k, c)?.local_count))
}

/// `N_{k,c,1}(n)`, valid for every `n`; even `n` vanishes through the `p = 2` factor.
pub fn count_e1(q: &CongruenceQuery) -> Result<Count> {
    count_e1_with(q, Exec::default())
}

pub fn count_e1_with(q: &CongruenceQuery, exec: Exec) -> Result<Count> {
    expect_exponent(q, 1)?;
    let (k, c) = (q.k(), q.c() as i128);
    assemble(q, exec, |p| local_count_e1(p, k, c))
}

/// Dispatches on the exponent. There is no closed form for `e >= 3`.
pub fn count(q: &CongruenceQuery) -> Result<Count> {
    count_with(q, Exec::default())
}

pub fn count_with(q: &CongruenceQuery, exec: Exec) -> Result<Count> {
    match q.e() {
        1 => count_e1_with(q, exec),
        2 => count_e2_with(q, exec),
        e => Err(Error::UnsupportedExponent(e)),
    }
}

/// Closed-form counts for every `c` in `[0, n)`, sharing one table of local
/// counts per prime.
pub fn distribution(n: u64, k: u32, e: u32, exec: Exec) -> Result<Vec<Count>> {
    CongruenceQuery::new(n, k, 0, e)?;
    if e > 2 {
        return Err(Error::UnsupportedExponent(e));
    }
    check_k(k)?;
    if n > DISTRIBUTION_LIMIT {
        return Err(Error::capacity(
            "closed-form distribution modulus",
            DISTRIBUTION_LIMIT as u128,
            n as u128,
        ));
    }
    if e == 2 && n.is_multiple_of(2) {
        return Ok(vec![BigUint::ZERO; n as usize]);
    }
    let factors = factorize(n).factors().to_vec();
    let mut tables = Vec::with_capacity(factors.len());
    for &(p, s) in &factors {
        let scale = BigUint::from(p).pow((k - 1) * (s - 1));
        let locals = exec.try_map((0..p).collect(), |c| match e {
            1 => local_count_e1(p, k, c as i128),
            _ => local_count_e2(p, k, c as i128).map(|b| b.local_count),
        })?;
        tables.push((p, locals.into_iter().map(|v| v * &scale).collect::<Vec<_>>()));
    }
    Ok(exec.map_range(n as usize, |c| {
        tables
            .iter()
            .fold(BigUint::one(), |acc, (p, t)| acc * &t[c % *p as usize])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exunits::{count_exunits, enumerate_exunits};
    use crate::oracle;

    fn q(n: u64, k: u32, c: i128, e: u32) -> CongruenceQuery {
        CongruenceQuery::new(n, k, c, e).unwrap()
    }

    fn big(v: u64) -> Count {
        BigUint::from(v)
    }

    #[test]
    fn local_e2_examples() {
        assert_eq!(local_count_e2(5, 2, 0).unwrap().local_count, big(4));
        assert_eq!(local_count_e2(5, 2, 2).unwrap().local_count, big(1));
        assert_eq!(local_count_e2(3, 2, 2).unwrap().local_count, big(1));
    }

    #[test]
    fn hand_expansion_p5_k2() {
        // c = 0: (1/5)(9 + 21 - 10) -> bracket 20
        let b = local_count_e2(5, 2, 0).unwrap();
        assert_eq!(b.leading, BigInt::from(9));
        assert_eq!(b.bracket(), BigInt::from(20));
        assert!(b.identity_holds());
        // c = 2: (1/5)(9 - 4 - 0)
        let b = local_count_e2(5, 2, 2).unwrap();
        assert_eq!(b.bracket(), BigInt::from(5));
    }

    #[test]
    fn local_e2_rejects_bad_primes() {
        assert!(local_count_e2(2, 3, 0).is_err());
        assert!(local_count_e2(9, 3, 0).is_err());
        assert!(matches!(local_count_e2(5, K_LIMIT + 1, 0), Err(Error::Capacity { .. })));
    }

    #[test]
    fn local_e1_examples() {
        assert_eq!(local_count_e1(5, 2, 0).unwrap(), big(2));
        assert_eq!(local_count_e1(2, 3, 1).unwrap(), big(0));
        assert_eq!(local_count_e1(3, 2, 1).unwrap(), big(1));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_e2(&q(4, 3, 1, 2)).unwrap(), big(0));
        assert_eq!(count_e2(&q(1, 2, 0, 2)).unwrap(), big(1));
        assert_eq!(count_e1(&q(15, 2, 1, 1)).unwrap(), big(3));
        assert_eq!(count_e1(&q(2, 5, 0, 1)).unwrap(), big(0));
        assert_eq!(count_e1(&q(1, 4, 0, 1)).unwrap(), big(1));
        assert_eq!(count(&q(5, 2, 0, 2)).unwrap(), big(4));
        assert_eq!(count(&q(5, 2, 0, 1)).unwrap(), big(2));
        assert_eq!(count(&q(5, 2, 0, 3)), Err(Error::UnsupportedExponent(3)));
    }

    #[test]
    fn n45_matches_recorded_oracle_value() {
        // oracle::count_convolution(45, 2, 0, 2) recorded before the closed form
        let oracle_value = oracle::count_convolution(&q(45, 2, 0, 2)).unwrap();
        let local3 = local_count_e2(3, 2, 0).unwrap().local_count;
        let closed = count_e2(&q(45, 2, 0, 2)).unwrap();
        assert_eq!(closed, big(3) * local3 * big(4));
        assert_eq!(closed, oracle_value);
        assert_eq!(closed, big(0));
    }

    #[test]
    fn e2_agrees_with_oracle() {
        for n in (1..=99u64).step_by(2) {
            for k in 2..=5u32 {
                let closed = distribution(n, k, 2, Exec::Parallel).unwrap();
                let brute = oracle::distribution(n, k, 2, Exec::Parallel).unwrap();
                assert_eq!(closed, brute, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn e1_agrees_with_oracle() {
        for n in 1..=99u64 {
            for k in 2..=5u32 {
                let closed = distribution(n, k, 1, Exec::Parallel).unwrap();
                let brute = oracle::distribution(n, k, 1, Exec::Parallel).unwrap();
                assert_eq!(closed, brute, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn distribution_agrees_with_pointwise_count() {
        for (n, e) in [(105u64, 2u32), (90, 1), (77, 1)] {
            let dist = distribution(n, 3, e, Exec::Sequential).unwrap();
            for c in 0..n {
                assert_eq!(dist[c as usize], count(&q(n, 3, c as i128, e)).unwrap());
            }
        }
    }

    #[test]
    fn divisibility_and_range_tripwire() {
        for p in (3..=100u64).filter(|&p| is_prime(p)) {
            for k in 2..=12u32 {
                for c in 0..p {
                    let b = local_count_e2(p, k, c as i128).unwrap();
                    assert!(b.identity_holds());
                }
            }
        }
    }

    #[test]
    fn local_sum_rule() {
        for p in (3..=50u64).filter(|&p| is_prime(p)) {
            for k in 2..=8u32 {
                let total: BigUint = (0..p)
                    .map(|c| local_count_e2(p, k, c as i128).unwrap().local_count)
                    .sum();
                assert_eq!(total, BigUint::from(p - 2).pow(k));
            }
        }
    }

    #[test]
    fn wide_primes_use_linear_classes() {
        // p > k + 1: residue classes never wrap; compare against the oracle
        for (p, k) in [(11u64, 3u32), (13, 4), (29, 5)] {
            let brute = oracle::distribution(p, k, 2, Exec::Parallel).unwrap();
            for c in 0..p {
                assert_eq!(local_count_e2(p, k, c as i128).unwrap().local_count, brute[c as usize]);
            }
        }
        // p far beyond k
        let b = local_count_e2(1_000_000_007, 3, 5).unwrap();
        assert!(b.identity_holds());
    }

    #[test]
    fn single_display_form_agrees_with_factored_form() {
        // Evaluate the collapsed product with the global sign (-1)^(k * omega(n))
        // and compare with the factored per-prime assembly.
        for n in [15u64, 45, 63, 105, 225, 1155] {
            let f = factorize(n);
            for k in 2..=5u32 {
                for c in 0..n.min(40) {
                    let mut numerator = sign_pow(k * f.omega() as u32);
                    let mut denominator = BigInt::one();
                    for &(p, s) in f.factors() {
                        let b = local_count_e2(p, k, c as i128).unwrap();
                        numerator *= b.bracket();
                        // p^(k s - s - k) split as p^((k-1)(s-1)) / p
                        numerator *= BigInt::from(p).pow((k - 1) * (s - 1));
                        denominator *= BigInt::from(p);
                    }
                    let (value, rem) = numerator.div_rem(&denominator);
                    assert!(rem.is_zero());
                    assert_eq!(value, BigInt::from(count_e2(&q(n, k, c as i128, 2)).unwrap()));
                }
            }
        }
    }

    #[test]
    fn linear_sign_is_k_omega() {
        // With the uncorrected global sign (-1)^k the product goes negative
        // whenever k is odd and omega(n) is even.
        let (n, k) = (35u64, 3u32);
        let f = factorize(n);
        let row = binomial_row(k as u64);
        let mut distinguished = false;
        for c in 0..n {
            let mut raw = BigInt::one();
            for &(p, _) in f.factors() {
                let class: BigUint = (0..=k as u64)
                    .filter(|j| j % p == c % p)
                    .map(|j| row[j as usize].clone())
                    .sum();
                let pb = BigInt::from(p);
                raw *= &pb * BigInt::from(class) + (BigInt::from(2) - &pb).pow(k)
                    - (BigInt::one() << k as usize);
                raw /= &pb;
            }
            let corrected = sign_pow(k * f.omega() as u32) * &raw;
            let uncorrected = sign_pow(k) * &raw;
            let truth = BigInt::from(oracle::count_convolution(&q(n, k, c as i128, 1)).unwrap());
            assert_eq!(corrected, truth);
            distinguished |= uncorrected != truth;
        }
        assert!(distinguished);
    }

    #[test]
    fn even_moduli_vanish() {
        for n in (2..=100u64).step_by(2) {
            assert!(enumerate_exunits(n).unwrap().is_empty());
            for k in 2..=6 {
                assert_eq!(count_e2(&q(n, k, 1, 2)).unwrap(), big(0));
                assert_eq!(count_e1(&q(n, k, 0, 1)).unwrap(), big(0));
            }
        }
    }

    #[test]
    fn large_modulus_is_fast_and_consistent() {
        let n = 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23u64;
        let total: BigUint = (0..n)
            .step_by(n as usize / 50)
            .map(|c| count_e2(&q(n, 50, c as i128, 2)).unwrap())
            .fold(BigUint::ZERO, |a, b| a + b);
        assert!(total > BigUint::ZERO);
        assert!(count_exunits(&factorize(n)).pow(50) > total);
    }
}
