//! Arithmetic and special functions: divisor sums, Kloosterman sums and
//! integer-order J-Bessel functions with certified decay majorants.

mod arith;
mod bessel;
mod kloosterman;

pub use arith::{divisor_count, divisors, factorize, gcd, mod_inverse, primes_up_to, sigma, SmallestFactorSieve};
pub use bessel::{bessel_j, bessel_j_majorant_ln, bessel_tail_bound, bessel_tail_bound_ln};
pub use kloosterman::{kloosterman, KloostermanTable};
