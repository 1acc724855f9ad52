//! Floating-point checks of the quadratic Gauss sum and the Legendre
//! character sum against `eps_p * sqrt(p) * (alpha/p)`, where `eps_p` is 1 for
//! `p = 1 (mod 4)` and `i` for `p = 3 (mod 4)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::{is_prime, legendre_unchecked, mul_mod, reduce};
use crate::error::{Error, Result};

/// Residual bound for `p < 500`.
pub const TOLERANCE: f64 = 1e-6;
/// Residual bound for `500 <= p < 10^4`.
pub const TOLERANCE_WIDE: f64 = 1e-4;

pub fn tolerance_for(p: u64) -> f64 {
    if p < 500 {
        TOLERANCE
    } else {
        TOLERANCE_WIDE
    }
}

/// One evaluated sum next to its predicted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumCheck {
    pub p: u64,
    pub alpha: u64,
    pub computed: Complex64,
    pub predicted: Complex64,
    pub residual: f64,
}

impl SumCheck {
    fn new(p: u64, alpha: u64, computed: Complex64, predicted: Complex64) -> Self {
        SumCheck {
            p,
            alpha,
            computed,
            predicted,
            residual: (computed - predicted).norm(),
        }
    }

    /// `| |computed|^2 - p |`
    pub fn modulus_defect(&self) -> f64 {
        (self.computed.norm_sqr() - self.p as f64).abs()
    }

    pub fn passes(&self) -> bool {
        let tol = tolerance_for(self.p);
        self.residual < tol && self.modulus_defect() < tol
    }
}

/// Compensated complex accumulator.
#[derive(Default)]
struct KahanSum {
    sum: Complex64,
    carry: Complex64,
}

impl KahanSum {
    fn add(&mut self, z: Complex64) {
        let y = z - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `e(r/p) = exp(2 pi i r / p)` from the reduced numerator.
pub fn unit_root(r: u64, p: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (r % p) as f64 / p as f64)
}

pub fn epsilon(p: u64) -> Complex64 {
    if p % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

fn predicted(p: u64, alpha: u64) -> Complex64 {
    epsilon(p) * (p as f64).sqrt() * legendre_unchecked(alpha as i128, p) as f64
}

fn validate(p: u64, alpha: i128) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    let a = reduce(alpha, p);
    if a == 0 {
        return Err(Error::InvalidArgument(format!("{p} divides {alpha}")));
    }
    Ok(a)
}

fn sum_over<I: Iterator<Item = Complex64>>(terms: I) -> Complex64 {
    let mut acc = KahanSum::default();
    terms.for_each(|z| acc.add(z));
    acc.sum
}

/// `sum_{x=0}^{p-1} e(alpha x^2 / p)`
pub fn gauss_sum(p: u64, alpha: i128) -> Result<SumCheck> {
    let a = validate(p, alpha)?;
    let computed = sum_over((0..p).map(|x| unit_root(mul_mod(a, mul_mod(x, x, p), p), p)));
    Ok(SumCheck::new(p, a, computed, predicted(p, a)))
}

/// `sum_{x=1}^{p-1} (x/p) e(alpha x / p)`
pub fn char_sum(p: u64, alpha: i128) -> Result<SumCheck> {
    let a = validate(p, alpha)?;
    let computed = sum_over(
        (1..p).map(|x| unit_root(mul_mod(a, x, p), p) * legendre_unchecked(x as i128, p) as f64),
    );
    Ok(SumCheck::new(p, a, computed, predicted(p, a)))
}

/// `sum_{x=2}^{p-1} e(x^2 t / p)`, the inner sum over exceptional units mod `p`.
pub fn truncated_square_sum(p: u64, t: i128) -> Result<Complex64> {
    let t = validate(p, t)?;
    Ok(sum_over((2..p).map(|x| unit_root(mul_mod(t, mul_mod(x, x, p), p), p))))
}

/// Compares [`truncated_square_sum`] with `eps_p sqrt(p) (t/p) - e(t/p) - 1`.
pub fn truncated_square_identity(p: u64, t: i128) -> Result<SumCheck> {
    let computed = truncated_square_sum(p, t)?;
    let t = reduce(t, p);
    let rhs = predicted(p, t) - unit_root(t, p) - 1.0;
    Ok(SumCheck::new(p, t, computed, rhs))
}
