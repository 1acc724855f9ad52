//! Brute-force ground truth for any exponent `e >= 1`.
//!
//! Two independent routes: full enumeration of `(Z_n**)^k` ([`count_naive`])
//! and repeated cyclic convolution of the power histogram of `Z_n**`
//! ([`count_convolution`]). Neither uses factorization or any closed form.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::arith::power_mod;
use crate::error::{Error, Result};
use crate::exunits::{enumerate_exunits, enumerate_units};
use crate::par::Exec;
use crate::query::{CongruenceQuery, Count};

/// Largest number of k-tuples the naive oracles will walk.
pub const NAIVE_LIMIT: u128 = 100_000_000;

/// Largest modulus the convolution oracle accepts.
pub const CONVOLUTION_LIMIT: u64 = 100_000;

fn tuple_count(set_len: usize, k: u32) -> u128 {
    (set_len as u128).checked_pow(k).unwrap_or(u128::MAX)
}

fn check_naive(set_len: usize, k: u32) -> Result<()> {
    let tuples = tuple_count(set_len, k);
    if tuples > NAIVE_LIMIT {
        return Err(Error::capacity("naive enumeration size", NAIVE_LIMIT, tuples));
    }
    Ok(())
}

/// Number of `(x_2, .., x_depth)` choices from `powers` whose sum is `target` mod n.
fn count_suffixes(powers: &[u64], depth: u32, target: u64, n: u64) -> u64 {
    if depth == 0 {
        return u64::from(target == 0);
    }
    if depth == 1 {
        return powers.iter().filter(|&&v| v == target).count() as u64;
    }
    powers
        .iter()
        .map(|&v| count_suffixes(powers, depth - 1, (target + n - v) % n, n))
        .sum()
}

fn count_over(set: &[u64], q: &CongruenceQuery, exec: Exec) -> Count {
    let n = q.n();
    let powers: Vec<u64> = set.iter().map(|&x| power_mod(x as i128, q.e() as u64, n)).collect();
    let c = q.c();
    let per_head = exec.map(powers.clone(), |v| {
        count_suffixes(&powers, q.k() - 1, (c + n - v) % n, n)
    });
    BigUint::from(per_head.into_iter().sum::<u64>())
}

/// Counts solutions by walking every tuple of `(Z_n**)^k`.
pub fn count_naive(q: &CongruenceQuery) -> Result<Count> {
    count_naive_with(q, Exec::default())
}

pub fn count_naive_with(q: &CongruenceQuery, exec: Exec) -> Result<Count> {
    let set = enumerate_exunits(q.n())?;
    check_naive(set.len(), q.k())?;
    Ok(count_over(set.members(), q, exec))
}

/// Same walk over all units `Z_n*` instead of exceptional units.
pub fn count_units_naive(q: &CongruenceQuery) -> Result<Count> {
    let units = enumerate_units(q.n())?;
    check_naive(units.len(), q.k())?;
    Ok(count_over(&units, q, Exec::default()))
}

/// Every solution tuple in `(Z_n**)^k`, in lexicographic order.
pub fn solutions_naive(q: &CongruenceQuery) -> Result<Vec<Vec<u64>>> {
    let set = enumerate_exunits(q.n())?;
    check_naive(set.len(), q.k())?;
    let n = q.n();
    let members = set.members();
    let k = q.k() as usize;
    let mut out = Vec::new();
    if members.is_empty() {
        return Ok(out);
    }
    let powers: Vec<u64> = members.iter().map(|&x| power_mod(x as i128, q.e() as u64, n)).collect();
    let mut idx = vec![0usize; k];
    loop {
        let sum = idx.iter().fold(0u64, |acc, &i| (acc + powers[i]) % n);
        if sum == q.c() % n {
            out.push(idx.iter().map(|&i| members[i]).collect());
        }
        // odometer, last coordinate fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < members.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `f[r] = #{x in Z_n** : x^e = r (mod n)}`, as sparse `(r, f[r])` pairs sorted by `r`.
pub fn power_histogram(n: u64, e: u32) -> Result<Vec<(u64, u64)>> {
    if n > CONVOLUTION_LIMIT {
        return Err(Error::capacity(
            "convolution modulus",
            CONVOLUTION_LIMIT as u128,
            n as u128,
        ));
    }
    let set = enumerate_exunits(n)?;
    let mut dense = vec![0u64; n as usize];
    for &x in set.members() {
        dense[power_mod(x as i128, e as u64, n) as usize] += 1;
    }
    Ok(dense
        .into_iter()
        .enumerate()
        .filter(|&(_, f)| f > 0)
        .map(|(r, f)| (r as u64, f))
        .collect())
}

/// Exact accumulator for convolution entries.
trait Accum: Clone + Send + Sync + Zero + for<'a> AddAssign<&'a Self> {
    fn from_u64(v: u64) -> Self;
    fn scaled(&self, s: u64) -> Self;
    fn into_big(self) -> BigUint;
}

impl Accum for u128 {
    fn from_u64(v: u64) -> Self {
        v as u128
    }
    fn scaled(&self, s: u64) -> Self {
        self * s as u128
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Accum for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn scaled(&self, s: u64) -> Self {
        self * s
    }
    fn into_big(self) -> BigUint {
        self
    }
}

fn convolve_once<T: Accum>(g: &[T], f: &[(u64, u64)], n: u64, exec: Exec) -> Vec<T> {
    exec.map_range(n as usize, |t| entry(g, f, n, t as u64))
}

fn entry<T: Accum>(g: &[T], f: &[(u64, u64)], n: u64, t: u64) -> T {
    let mut acc = T::zero();
    for &(s, fs) in f {
        let src = ((t + n - s) % n) as usize;
        if !g[src].is_zero() {
            acc += &g[src].scaled(fs);
        }
    }
    acc
}

/// Runs `k - 1` folds; returns the whole distribution, or just entry `only`.
fn fold_all<T: Accum>(f: &[(u64, u64)], n: u64, k: u32, only: Option<u64>, exec: Exec) -> Vec<BigUint> {
    let mut g = vec![T::zero(); n as usize];
    for &(r, fr) in f {
        g[r as usize] = T::from_u64(fr);
    }
    for _ in 1..k - 1 {
        g = convolve_once(&g, f, n, exec);
    }
    match only {
        Some(c) => vec![entry(&g, f, n, c).into_big()],
        None => convolve_once(&g, f, n, exec).into_iter().map(Accum::into_big).collect(),
    }
}

fn run_convolution(n: u64, k: u32, e: u32, only: Option<u64>, exec: Exec) -> Result<Vec<Count>> {
    let f = power_histogram(n, e)?;
    let set_size: u64 = f.iter().map(|&(_, v)| v).sum();
    // total mass |Z_n**|^k bounds every entry; pick the narrowest exact accumulator
    let fits_u128 = BigUint::from(set_size).pow(k).to_u128().is_some();
    Ok(if fits_u128 {
        fold_all::<u128>(&f, n, k, only, exec)
    } else {
        fold_all::<BigUint>(&f, n, k, only, exec)
    })
}

/// Counts solutions as entry `c` of the k-fold cyclic self-convolution of the
/// power histogram.
pub fn count_convolution(q: &CongruenceQuery) -> Result<Count> {
    count_convolution_with(q, Exec::default())
}

pub fn count_convolution_with(q: &CongruenceQuery, exec: Exec) -> Result<Count> {
    let mut v = run_convolution(q.n(), q.k(), q.e(), Some(q.c()), exec)?;
    Ok(v.pop().expect("single entry"))
}

/// Counts for every `c` in `[0, n)` at once.
pub fn distribution(n: u64, k: u32, e: u32, exec: Exec) -> Result<Vec<Count>> {
    CongruenceQuery::new(n, k, 0, e)?;
    run_convolution(n, k, e, None, exec)
}
