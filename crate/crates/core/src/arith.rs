//! Exact integer arithmetic for 64-bit moduli: primality, factorization,
//! modular powers, Legendre symbols, CRT and big-integer binomials.
//!
//! Every modular product goes through a 128-bit intermediate, so moduli may
//! use the full `u64` range.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// Trial division covers divisors up to this bound before switching to rho.
const TRIAL_LIMIT: u64 = 1_000_000;

/// Witnesses that make Miller-Rabin deterministic below 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// Reduces any integer into `[0, m)`.
#[inline]
pub fn reduce(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// `base^exp mod m`, with `base` reduced first. `m = 1` gives 0.
pub fn power_mod(base: i128, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1, "power_mod: modulus must be positive");
    if m == 1 {
        return 0;
    }
    let mut b = reduce(base, m);
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| reduce(old_s, m))
}

/// Deterministic primality test for the whole `u64` range.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if m.is_multiple_of(p) {
            return m == p;
        }
    }
    let mut d = m - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = power_mod(a as i128, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. `m` must be odd, composite and not a
/// perfect power of a tiny prime; returns a nontrivial divisor.
fn pollard_brent(m: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| add_mod(mul_mod(x, x, m), c, m);
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys);
        let mut g;
        const BATCH: u64 = 128;
        loop {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            loop {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), m);
                }
                g = q.gcd(&m);
                k += BATCH;
                if k >= r || g != 1 {
                    break;
                }
            }
            r *= 2;
            if g != 1 {
                break;
            }
        }
        if g == m {
            // batch overshot; step one at a time from the saved point
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&m);
                if g != 1 {
                    break;
                }
            }
        }
        if g != m {
            return g;
        }
    }
    unreachable!()
}

fn split_into(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let d = pollard_brent(m);
    split_into(d, out);
    split_into(m / d, out);
}

/// Canonical prime-power decomposition of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p` in the value (0 if `p` does not divide it).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, s)| s)
    }

    pub fn is_odd(&self) -> bool {
        self.value % 2 == 1
    }
}

/// Factors `m` by trial division up to 10^6 followed by Pollard rho.
///
/// Panics on `m = 0`.
pub fn factorize(m: u64) -> Factorization {
    assert!(m >= 1, "factorize: input must be positive");
    let value = m;
    let mut rest = m;
    let mut factors = Vec::new();
    // 2, 3, then the 6j +- 1 wheel; composite candidates never divide
    let candidates = [2u64, 3]
        .into_iter()
        .chain((5..=TRIAL_LIMIT).step_by(6).flat_map(|d| [d, d + 2]));
    for p in candidates {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut s = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                s += 1;
            }
            factors.push((p, s));
        }
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_into(rest, &mut big);
        big.sort_unstable();
        for p in big {
            match factors.last_mut() {
                Some((q, s)) if *q == p => *s += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Factorization { value, factors }
}

/// Legendre symbol `(a/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(a: i128, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "Legendre symbol needs an odd prime modulus, got {p}"
        )));
    }
    Ok(legendre_unchecked(a, p))
}

/// Legendre symbol without validating `p`. Caller guarantees `p` is an odd prime.
pub(crate) fn legendre_unchecked(a: i128, p: u64) -> i8 {
    match power_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Solves `x = b_i (mod m_i)` for pairwise coprime moduli; the answer lies in
/// `[0, prod m_i)`.
pub fn crt_solve(system: &[(i128, u64)]) -> Result<u128> {
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for (i, &(b, m)) in system.iter().enumerate() {
        if m == 0 {
            return Err(Error::InvalidArgument("CRT modulus must be positive".into()));
        }
        let b = reduce(b, m);
        let g = (modulus % m as u128) as u64;
        // modulus and m coprime <=> (modulus mod m) and m coprime
        if g.gcd(&m) != 1 {
            let prev = system[..i]
                .iter()
                .map(|&(_, mi)| mi)
                .find(|mi| mi.gcd(&m) != 1)
                .unwrap_or(m);
            return Err(Error::NotCoprime(prev, m));
        }
        let next = modulus
            .checked_mul(m as u128)
            .ok_or_else(|| Error::capacity("CRT modulus product", u128::MAX, u128::MAX))?;
        // x + modulus * t = b (mod m)  =>  t = (b - x) * modulus^-1 (mod m)
        let inv = inverse_mod(g, m).expect("coprime moduli");
        let diff = (b as i128 - (x % m as u128) as i128).rem_euclid(m as i128) as u64;
        let t = mul_mod(diff, inv, m);
        x += modulus * t as u128;
        modulus = next;
    }
    Ok(x)
}

/// Exact `C(t, x)`; zero when `x > t`.
pub fn binomial(t: u64, x: u64) -> BigUint {
    if x > t {
        return BigUint::ZERO;
    }
    let x = x.min(t - x);
    let mut acc = BigUint::one();
    for i in 1..=x {
        acc *= t - x + i;
        acc /= i;
    }
    acc
}

/// The full row `C(t, 0), ..., C(t, t)`.
pub fn binomial_row(t: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(t as usize + 1);
    let mut acc = BigUint::one();
    row.push(acc.clone());
    for i in 1..=t {
        acc *= t - i + 1;
        acc /= i;
        row.push(acc.clone());
    }
    row
}

/// Trinomial coefficient `t! / (a! b! c!)` with `a + b + c = t`.
pub fn trinomial(t: u64, a: u64, b: u64, c: u64) -> Result<BigUint> {
    if a.checked_add(b).and_then(|s| s.checked_add(c)) != Some(t) {
        return Err(Error::InvalidArgument(format!(
            "trinomial parts {a}+{b}+{c} do not sum to {t}"
        )));
    }
    Ok(binomial(t, a) * binomial(t - a, b))
}
