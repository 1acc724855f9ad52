//! Hensel lifting of simple roots from `p` to `p^s`, and the solution lift
//! that turns one exceptional-unit solution mod `p` into `p^((s-1)(k-1))`
//! solutions mod `p^s`.

use crate::arith::{inverse_mod, is_prime, mul_mod, power_mod, reduce};
use crate::error::{Error, Result};
use crate::exunits::is_exunit;
use crate::query::CongruenceQuery;

/// A root of `f` modulo `p^s` lying over `base_root` modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftResult {
    pub root: u64,
    pub base_root: u64,
    pub p: u64,
    pub s: u32,
}

impl LiftResult {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.s)
    }
}

/// Polynomial evaluated modulo a prime power.
trait ModPoly {
    fn eval(&self, x: u64, m: u64) -> u64;
    fn derivative(&self, x: u64, m: u64) -> u64;
}

/// Dense integer coefficients, constant term first.
struct Dense<'a>(&'a [i128]);

impl ModPoly for Dense<'_> {
    fn eval(&self, x: u64, m: u64) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, m) + reduce(c, m)) % m)
    }

    fn derivative(&self, x: u64, m: u64) -> u64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0, |acc, (i, &c)| {
                let coeff = mul_mod(reduce(c, m), i as u64 % m, m);
                (mul_mod(acc, x, m) + coeff) % m
            })
    }
}

/// `x^e + constant`
struct PowerPlus {
    e: u32,
    constant: u64,
}

impl ModPoly for PowerPlus {
    fn eval(&self, x: u64, m: u64) -> u64 {
        (power_mod(x as i128, self.e as u64, m) as u128 + self.constant as u128 % m as u128) as u64 % m
    }

    fn derivative(&self, x: u64, m: u64) -> u64 {
        mul_mod(self.e as u64 % m, power_mod(x as i128, self.e as u64 - 1, m), m)
    }
}

fn prime_power(p: u64, s: u32) -> Result<u64> {
    p.checked_pow(s)
        .ok_or_else(|| Error::capacity("lifting modulus p^s", u64::MAX as u128, u128::MAX))
}

/// Newton iteration with precision doubling: `p, p^2, p^4, ...` capped at `p^s`.
fn newton<F: ModPoly>(f: &F, a0: u64, p: u64, s: u32) -> Result<LiftResult> {
    if s == 0 {
        return Err(Error::InvalidArgument("lifting exponent s must be at least 1".into()));
    }
    let target = prime_power(p, s)?;
    let base_root = a0 % p;
    if f.eval(base_root, p) != 0 {
        return Err(Error::NotARoot(base_root, p));
    }
    if f.derivative(base_root, p) == 0 {
        return Err(Error::SingularDerivative(base_root, p));
    }
    let mut root = base_root;
    let mut modulus = p;
    while modulus < target {
        let next = modulus.checked_mul(modulus).map_or(target, |m| m.min(target));
        let inv = inverse_mod(f.derivative(root, next), next)
            .ok_or_else(|| Error::Invariant("derivative stopped being a unit".into()))?;
        let step = mul_mod(f.eval(root, next), inv, next);
        root = (root + next - step) % next;
        modulus = next;
    }
    if f.eval(root, target) != 0 {
        return Err(Error::Invariant(format!("lifted value {root} is not a root mod {target}")));
    }
    Ok(LiftResult {
        root,
        base_root,
        p,
        s,
    })
}

/// Lifts a simple root `a0` of `f` (coefficients constant-first) from `p` to
/// the unique root modulo `p^s` congruent to `a0`.
pub fn lift_root(coeffs: &[i128], a0: u64, p: u64, s: u32) -> Result<LiftResult> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    newton(&Dense(coeffs), a0, p, s)
}

/// Lifts a solution `sol` of the query modulo the prime `p = q.n()` to one
/// modulo `p^target_s`: the first `k - 1` coordinates are shifted by
/// `offsets` (each a multiple of `p` below `p^target_s`) and the last one is
/// the Hensel lift of `x^e + sum (a_i + b_i)^e - c`.
pub fn lift_solution(
    sol: &[u64],
    q: &CongruenceQuery,
    target_s: u32,
    offsets: &[u64],
) -> Result<Vec<u64>> {
    let p = q.n();
    let e = q.e();
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("base modulus {p} is not prime")));
    }
    if p == 2 || (e as u64).is_multiple_of(p) {
        return Err(Error::Hypothesis(format!("prime {p} must be odd and coprime to e = {e}")));
    }
    let k = q.k() as usize;
    if sol.len() != k || offsets.len() + 1 != k {
        return Err(Error::InvalidArgument(format!(
            "expected {k} coordinates and {} offsets",
            k - 1
        )));
    }
    if let Some(&bad) = sol.iter().find(|&&a| !is_exunit(a as i128, p)) {
        return Err(Error::InvalidArgument(format!("{bad} is not an exceptional unit mod {p}")));
    }
    let sum = sol
        .iter()
        .fold(0u64, |acc, &a| (acc + power_mod(a as i128, e as u64, p)) % p);
    if sum != q.c() {
        return Err(Error::InvalidArgument("base tuple does not solve the congruence".into()));
    }
    let modulus = prime_power(p, target_s.max(1))?;
    if let Some(&bad) = offsets.iter().find(|&&b| b % p != 0 || b >= modulus) {
        return Err(Error::InvalidArgument(format!(
            "offset {bad} is not a multiple of {p} below {modulus}"
        )));
    }

    let mut lifted: Vec<u64> = sol[..k - 1]
        .iter()
        .zip(offsets)
        .map(|(&a, &b)| (a % modulus + b) % modulus)
        .collect();
    let head_sum = lifted
        .iter()
        .fold(0u64, |acc, &x| (acc + power_mod(x as i128, e as u64, modulus)) % modulus);
    let f = PowerPlus {
        e,
        constant: reduce(head_sum as i128 - q.c() as i128, modulus),
    };
    let last = newton(&f, sol[k - 1], p, target_s)?;
    lifted.push(last.root);
    Ok(lifted)
}

/// All offset tuples in `(p Z / p^s Z)^(k-1)`, in lexicographic order.
pub fn offset_tuples(p: u64, s: u32, k: u32) -> Result<Vec<Vec<u64>>> {
    let modulus = prime_power(p, s)?;
    let choices: Vec<u64> = (0..modulus).step_by(p as usize).collect();
    let mut out = vec![Vec::new()];
    for _ in 1..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&b| {
                    let mut t = prefix.clone();
                    t.push(b);
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

/// Lifts every base solution with every offset tuple.
pub fn lift_all(base: &[Vec<u64>], q: &CongruenceQuery, target_s: u32) -> Result<Vec<Vec<u64>>> {
    let offsets = offset_tuples(q.n(), target_s, q.k())?;
    let mut out = Vec::with_capacity(base.len() * offsets.len());
    for sol in base {
        for b in &offsets {
            out.push(lift_solution(sol, q, target_s, b)?);
        }
    }
    Ok(out)
}
