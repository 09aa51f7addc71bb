use super::ntt::mul_bigint;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Power series Σ_{n=0}^{N} a_n q^n with exact integer coefficients,
/// truncated at order N (all arithmetic is modulo q^{N+1}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![BigInt::zero(); n + 1] }
    }

    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Series from explicit coefficients; `coeffs.len()` becomes N + 1.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least the constant term");
        Self { coeffs }
    }

    pub fn from_i64(n: usize, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(n);
        for (c, &v) in s.coeffs.iter_mut().zip(coeffs) {
            *c = BigInt::from(v);
        }
        s
    }

    /// Truncation order N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.order());
        Self { coeffs: self.coeffs[..=n].to_vec() }
    }

    /// Multiplies by q^s, keeping the truncation order.
    pub fn shift(&self, s: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in s..=n {
            out.coeffs[i] = self.coeffs[i - s].clone();
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn square(&self) -> Self {
        let n = self.order();
        Self { coeffs: mul_bigint(&self.coeffs, &self.coeffs, n + 1) }
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let n = self.order().min(rhs.order());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect() }
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let n = self.order().min(rhs.order());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect() }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        if std::ptr::eq(self, rhs) {
            return self.square();
        }
        let n = self.order().min(rhs.order());
        QSeries { coeffs: mul_bigint(&self.coeffs, &rhs.coeffs, n + 1) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(a: &QSeries, b: &QSeries) -> QSeries {
        let n = a.order().min(b.order());
        let mut out = QSeries::zero(n);
        for i in 0..=n {
            for j in 0..=n - i {
                out.coeffs[i + j] += &a.coeffs[i] * &b.coeffs[j];
            }
        }
        out
    }

    #[test]
    fn geometric_series_inverse() {
        // (1 - q) * (1 + q + q^2 + ...) = 1
        let n = 300;
        let a = QSeries::from_i64(n, &[1, -1]);
        let b = QSeries::from_coeffs(vec![BigInt::one(); n + 1]);
        assert_eq!(&a * &b, QSeries::one(n));
    }

    #[test]
    fn pow_matches_repeated_naive_products() {
        let n = 120;
        let base = QSeries::from_i64(n, &[1, -3, 0, 5, 2]);
        let mut naive = QSeries::one(n);
        for _ in 0..7 {
            naive = naive_mul(&naive, &base);
        }
        assert_eq!(base.pow(7), naive);
    }

    #[test]
    fn mixed_truncation_takes_minimum() {
        let a = QSeries::one(10);
        let b = QSeries::one(4);
        assert_eq!((&a * &b).order(), 4);
        assert_eq!((&a + &b).order(), 4);
    }
}
