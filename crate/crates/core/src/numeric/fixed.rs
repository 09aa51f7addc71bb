use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

/// Fixed-point reals stored as big integers scaled by `2^prec`.
///
/// Used for the handful of places where an algebraic number has to be carried
/// to far more than 53 bits (Hecke eigenvalues and eigenvectors) before it
/// multiplies exact q-expansion coefficients.
#[derive(Clone, Copy, Debug)]
pub struct FixedPoint {
    pub prec: u32,
}

impl FixedPoint {
    pub fn new(prec: u32) -> Self {
        Self { prec }
    }

    pub fn from_int(&self, n: &BigInt) -> BigInt {
        n << self.prec as usize
    }

    pub fn from_f64(&self, x: f64) -> BigInt {
        assert!(x.is_finite());
        if x == 0.0 {
            return BigInt::zero();
        }
        let (mant, exp) = frexp(x);
        // x = mant * 2^exp, mant in [0.5, 1); take 53 bits of mantissa.
        let m = (mant * (1u64 << 53) as f64) as i64;
        let shift = exp - 53 + self.prec as i32;
        let m = BigInt::from(m);
        if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        }
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.prec as usize
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.prec as usize) / b
    }

    /// Returns `(m, e)` with value ≈ m·2^e and |m| < 2^64.
    pub fn to_scaled_f64(&self, a: &BigInt) -> (f64, i64) {
        let (m, e) = bigint_to_scaled_f64(a);
        (m, e - self.prec as i64)
    }

    pub fn to_f64(&self, a: &BigInt) -> f64 {
        let (m, e) = self.to_scaled_f64(a);
        m * 2f64.powi(e.clamp(-1100, 1100) as i32)
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let bits = x.abs().to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    if raw_exp == 0 {
        // subnormal: rescale
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let exp = raw_exp - 1022;
    let mant = x / 2f64.powi(exp);
    (mant, exp)
}

/// Big integer as `(m, e)` with value ≈ m·2^e, keeping the top 64 bits.
pub fn bigint_to_scaled_f64(a: &BigInt) -> (f64, i64) {
    if a.is_zero() {
        return (0.0, 0);
    }
    let bits = a.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (a.magnitude() >> shift as usize).to_u64().unwrap_or(u64::MAX) as f64;
    let m = if a.sign() == Sign::Minus { -top } else { top };
    (m, shift)
}

/// log2 |a|, or `-inf` for zero.
pub fn bigint_log2(a: &BigInt) -> f64 {
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = bigint_to_scaled_f64(&a.abs());
    m.log2() + e as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_roundtrip() {
        let fx = FixedPoint::new(200);
        let a = fx.from_f64(1.5);
        let b = fx.from_f64(-0.25);
        assert_eq!(fx.to_f64(&fx.mul(&a, &b)), -0.375);
        assert_eq!(fx.to_f64(&fx.div(&a, &b)), -6.0);
        let big = BigInt::from(10).pow(400);
        assert!((bigint_log2(&big) - 400.0 * 10f64.log2()).abs() < 1e-9);
    }
}
