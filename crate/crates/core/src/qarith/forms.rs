//! q-expansions of Δ, E₄, E₆ and the Victor Miller basis of S_k(SL₂(ℤ)).

use super::ntt::{primes, NttPrime};
use super::series::QSeries;
use crate::error::{domain, Error, Result};
use crate::special::SmallestFactorSieve;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

/// Dimension of the space of level-one cusp forms of even weight k.
pub fn dim_cusp_forms(k: u32) -> usize {
    if k % 2 == 1 || k < 12 || k == 14 {
        return 0;
    }
    let d = (k / 12) as usize;
    if k % 12 == 2 {
        d - 1
    } else {
        d
    }
}

/// Jacobi's identity η(τ)³/q^{1/8} = Σ_{j≥0} (−1)^j (2j+1) q^{j(j+1)/2}.
fn eta_cubed_terms(n: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut j = 0usize;
    while j * (j + 1) / 2 <= n {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push((j * (j + 1) / 2, sign * (2 * j as i64 + 1)));
        j += 1;
    }
    out
}

/// Δ = q ∏(1 − qⁿ)²⁴ = q·(η³/q^{1/8})⁸ to order q^N, with exact coefficients τ(n).
pub fn delta_qexp(n: usize) -> QSeries {
    let mut eta3 = QSeries::zero(n);
    if n >= 1 {
        let mut c: Vec<BigInt> = vec![BigInt::zero(); n];
        for (e, v) in eta_cubed_terms(n - 1) {
            c[e] = BigInt::from(v);
        }
        let base = QSeries::from_coeffs(c);
        let p8 = base.square().square().square();
        let mut coeffs = vec![BigInt::zero()];
        coeffs.extend(p8.into_coeffs());
        eta3 = QSeries::from_coeffs(coeffs);
    }
    eta3
}

/// Normalized Eisenstein series E₄ = 1 + 240Σσ₃(n)qⁿ or E₆ = 1 − 504Σσ₅(n)qⁿ.
pub fn eisenstein_qexp(weight: u32, n: usize) -> Result<QSeries> {
    let (e, c) = match weight {
        4 => (3u32, 240i64),
        6 => (5, -504),
        w => return Err(Error::UnsupportedWeight(w as i64)),
    };
    let sieve = SmallestFactorSieve::new(n.max(1));
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::from(1));
    for m in 1..=n {
        let mut s = BigUint::from(1u32);
        for (p, a) in sieve.factorize(m) {
            let pe = BigUint::from(p).pow(e);
            let mut term = BigUint::from(1u32);
            let mut acc = BigUint::from(1u32);
            for _ in 0..a {
                term *= &pe;
                acc += &term;
            }
            s *= acc;
        }
        coeffs.push(BigInt::from_biguint(Sign::Plus, s) * c);
    }
    Ok(QSeries::from_coeffs(coeffs))
}

/// Exponents (a, b) with 4a + 6b ≡ k' where k = 12d + k'.
fn vm_params(k: u32) -> (usize, u32, u32) {
    let d = dim_cusp_forms(k);
    let (a, b) = match k - 12 * d as u32 {
        0 => (0, 0),
        4 => (1, 0),
        6 => (0, 1),
        8 => (2, 0),
        10 => (1, 1),
        14 => (2, 1),
        r => unreachable!("residue {r} for weight {k}"),
    };
    (d, a, b)
}

/// Residues of E₄, E₆ and Δ modulo one transform prime.
struct ModularGenerators<'a> {
    q: &'a NttPrime,
    n: usize,
}

impl ModularGenerators<'_> {
    fn eisenstein(&self, sieve: &SmallestFactorSieve, e: u32, c: i64) -> Vec<u32> {
        let q = self.q;
        let cm = q.reduce_i64(c);
        let sigma = sieve.sigma_table_mod(e, q.p as u64);
        let mut v: Vec<u32> = sigma[..=self.n].iter().map(|&s| q.mul(cm, s as u32)).collect();
        v[0] = 1;
        v
    }

    fn delta(&self) -> Vec<u32> {
        let q = self.q;
        let n = self.n;
        let mut out = vec![0u32; n + 1];
        if n == 0 {
            return out;
        }
        let mut base = vec![0u32; n];
        for (e, v) in eta_cubed_terms(n - 1) {
            base[e] = q.reduce_i64(v);
        }
        for _ in 0..3 {
            base = q.mul_poly(&base, &base, n);
        }
        out[1..].copy_from_slice(&base);
        out
    }
}

/// Victor Miller basis reduced modulo one prime; d vectors of length n + 1.
fn vm_basis_mod(k: u32, n: usize, q: &NttPrime, sieve: &SmallestFactorSieve) -> Vec<Vec<u32>> {
    let (d, a, b) = vm_params(k);
    let gen = ModularGenerators { q, n };
    let len = n + 1;
    let delta = gen.delta();
    let e6 = gen.eisenstein(sieve, 5, -504);
    let mut tail = vec![0u32; len];
    tail[0] = 1;
    if a > 0 {
        let e4 = gen.eisenstein(sieve, 3, 240);
        tail = if a == 1 { e4 } else { q.mul_poly(&e4, &e4, len) };
    }
    if b == 1 {
        tail = q.mul_poly(&tail, &e6, len);
    }
    let e6sq = q.mul_poly(&e6, &e6, len);
    // g_j = Δ^j E₆^{2(d−j)} · tail, j = d, d−1, ..., 1
    let mut delta_pows = Vec::with_capacity(d);
    let mut cur = delta.clone();
    for j in 1..=d {
        if j > 1 {
            cur = q.mul_poly(&cur, &delta, len);
        }
        delta_pows.push(cur.clone());
    }
    let mut g: Vec<Vec<u32>> = vec![Vec::new(); d];
    let mut e6pow = tail;
    for j in (1..=d).rev() {
        g[j - 1] = q.mul_poly(&delta_pows[j - 1], &e6pow, len);
        if j > 1 {
            e6pow = q.mul_poly(&e6pow, &e6sq, len);
        }
    }
    // echelonize: each g_j = q^j + ..., so only upward elimination is needed
    for i in (0..d).rev() {
        for j in (i + 1)..d {
            let c = g[i][j + 1];
            if c == 0 {
                continue;
            }
            let (head, rest) = g.split_at_mut(j);
            let gi = &mut head[i];
            let gj = &rest[0];
            for t in (j + 1)..len {
                gi[t] = q.sub(gi[t], q.mul(c, gj[t]));
            }
        }
    }
    g
}

/// Victor Miller basis f_1, …, f_d of S_k to order q^N, with f_i = q^i + O(q^{d+1}).
///
/// Computed modulo successive transform primes and lifted by Chinese
/// remaindering once the mixed-radix digits of every coefficient have
/// stabilized for two consecutive primes.
pub fn victor_miller_basis(k: u32, n: usize) -> Result<Vec<QSeries>> {
    if k % 2 == 1 || k < 4 {
        return domain(format!("victor_miller_basis: weight must be even and at least 4, got {k}"));
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if n < d {
        return Err(Error::InsufficientTruncation { required: d, available: n });
    }
    let sieve = SmallestFactorSieve::new(n.max(1));
    let len = n + 1;
    let total = d * len;
    let pool = primes();
    // digits[t][idx]: mixed-radix digit t of coefficient idx
    let mut digits: Vec<Vec<u32>> = Vec::new();
    for (t, q) in pool.iter().enumerate() {
        let basis = vm_basis_mod(k, n, q, &sieve);
        let inv_t: Vec<u32> = (0..t).map(|s| q.inv(pool[s].p % q.p)).collect();
        let mut y = vec![0u32; total];
        for (i, row) in basis.iter().enumerate() {
            for (m, &r) in row.iter().enumerate() {
                let idx = i * len + m;
                let mut v = r;
                for s in 0..t {
                    v = q.mul(q.sub(v, digits[s][idx] % q.p), inv_t[s]);
                }
                y[idx] = v;
            }
        }
        digits.push(y);
        if t >= 2 && settled(&digits, t) {
            return Ok(lift(&digits, t - 1, d, len));
        }
    }
    Err(Error::Domain(format!(
        "victor_miller_basis: coefficients of weight {k} to order {n} exceed the prime pool"
    )))
}

fn settled(digits: &[Vec<u32>], t: usize) -> bool {
    let pool = primes();
    let (pa, pb) = (pool[t - 1].p - 1, pool[t].p - 1);
    digits[t - 1]
        .iter()
        .zip(&digits[t])
        .all(|(&a, &b)| (a == 0 && b == 0) || (a == pa && b == pb))
}

/// Reconstructs signed integers from the first `m` digits; digit m (already
/// checked to agree with digit m + 1) is 0 for non-negative values and p − 1
/// for negative ones.
fn lift(digits: &[Vec<u32>], m: usize, d: usize, len: usize) -> Vec<QSeries> {
    let pool = primes();
    let modulus: BigUint = pool[..m].iter().fold(BigUint::from(1u32), |acc, q| acc * q.p);
    let coefficient = |idx: usize| -> BigInt {
        let mut limbs: Vec<u32> = vec![digits[m - 1][idx]];
        for s in (0..m - 1).rev() {
            let p = pool[s].p as u64;
            let mut carry = digits[s][idx] as u64;
            for l in limbs.iter_mut() {
                let v = *l as u64 * p + carry;
                *l = v as u32;
                carry = v >> 32;
            }
            if carry > 0 {
                limbs.push(carry as u32);
            }
        }
        let x = BigUint::new(limbs);
        if digits[m][idx] == 0 {
            BigInt::from_biguint(Sign::Plus, x)
        } else {
            BigInt::from_biguint(Sign::Minus, &modulus - x)
        }
    };
    (0..d)
        .map(|i| QSeries::from_coeffs((0..len).map(|t| coefficient(i * len + t)).collect()))
        .collect()
}
