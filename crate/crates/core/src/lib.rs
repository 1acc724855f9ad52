//! Exact counting of exceptional-unit solutions of diagonal congruences
//!
//! ```text
//! x_1^e + ... + x_k^e = c (mod n),   every x_i with gcd(x_i, n) = gcd(1 - x_i, n) = 1
//! ```
//!
//! Two independent routes are provided: explicit closed forms for `e = 1` and
//! `e = 2` ([`closed_form`]) assembled from per-prime local counts, and
//! brute-force oracles for any `e >= 1` ([`oracle`]). The remaining modules
//! hold the arithmetic substrate, Hensel lifting, exponential-sum checks and
//! the verification campaigns that tie everything together.
//!
//! With the default `parallel` feature the sweeps and campaigns fan out over
//! rayon; without it every [`Exec`] request runs sequentially.

pub mod arith;
pub mod campaign;
pub mod charsums;
pub mod closed_form;
mod error;
pub mod exunits;
pub mod hensel;
pub mod oracle;
mod par;
mod query;

pub use arith::Factorization;
pub use error::{Error, Result};
pub use exunits::ExUnitSet;
pub use par::Exec;
pub use query::{CongruenceQuery, Count};
