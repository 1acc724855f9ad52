use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Exact nonnegative solution count.
pub type Count = BigUint;

/// One counting problem `x_1^e + ... + x_k^e = c (mod n)` over exceptional
/// units. `c` is stored reduced into `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceQuery {
    n: u64,
    k: u32,
    c: u64,
    e: u32,
}

impl CongruenceQuery {
    pub fn new(n: u64, k: u32, c: i128, e: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus n must be positive".into()));
        }
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("exponent e must be at least 1".into()));
        }
        let c = c.rem_euclid(n as i128) as u64;
        Ok(CongruenceQuery { n, k, c, e })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Same `k`, `c`, `e` posed modulo a different `n`.
    pub fn with_modulus(&self, n: u64) -> Result<Self> {
        Self::new(n, self.k, self.c as i128, self.e)
    }

    pub fn with_c(&self, c: i128) -> Self {
        CongruenceQuery {
            c: c.rem_euclid(self.n as i128) as u64,
            ..*self
        }
    }
}
