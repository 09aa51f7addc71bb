use crate::error::{domain, Result};
use num_bigint::BigUint;
use num_traits::One;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m` by extended Euclid, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
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
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of n in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// σ_e(n) = Σ_{d | n} d^e, exact.
pub fn sigma(e: u32, n: u64) -> Result<BigUint> {
    if n == 0 {
        return domain("sigma: n must be positive");
    }
    let mut total = BigUint::one();
    for (p, a) in factorize(n) {
        let pe = BigUint::from(p).pow(e);
        let mut term = BigUint::one();
        let mut acc = BigUint::one();
        for _ in 0..a {
            term *= &pe;
            acc += &term;
        }
        total *= acc;
    }
    Ok(total)
}

/// d(n), the number of positive divisors.
pub fn divisor_count(n: u64) -> Result<u64> {
    if n == 0 {
        return domain("divisor_count: n must be positive");
    }
    Ok(factorize(n).iter().map(|&(_, e)| e as u64 + 1).product())
}

pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for fast factorization of every n ≤ limit.
#[derive(Clone, Debug)]
pub struct SmallestFactorSieve {
    spf: Vec<u32>,
}

impl SmallestFactorSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Ascending (p, e) pairs; `n` must be in 1..=limit.
    pub fn factorize(&self, mut n: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// σ_e(0..=limit) reduced modulo `m < 2³²`, built multiplicatively in one pass.
    /// Entry 0 is 0.
    pub fn sigma_table_mod(&self, e: u32, m: u64) -> Vec<u64> {
        assert!(m > 1 && m <= u32::MAX as u64 + 1);
        let limit = self.limit();
        let mut sigma = vec![0u64; limit + 1];
        // prime_power[n]: the full power of spf(n) dividing n
        let mut prime_power = vec![0u32; limit + 1];
        // pe[n] = spf(n)^e mod m, filled only where needed
        let mut pe = vec![0u64; limit + 1];
        if limit >= 1 {
            sigma[1] = 1 % m;
        }
        for n in 2..=limit {
            let p = self.spf[n] as usize;
            let rest = n / p;
            if p == n {
                pe[n] = pow_mod(p as u64, e as u64, m);
                prime_power[n] = n as u32;
                sigma[n] = (1 + pe[n]) % m;
            } else if self.spf[rest] as usize == p {
                let pp = prime_power[rest] as usize * p;
                prime_power[n] = pp as u32;
                let cofactor = n / pp;
                let spp = (sigma[pp / p] * pe[p] + 1) % m;
                sigma[n] = if cofactor == 1 { spp } else { spp * sigma[cofactor] % m };
            } else {
                prime_power[n] = p as u32;
                sigma[n] = sigma[p] * sigma[rest] % m;
            }
        }
        sigma
    }

    /// σ_e(n) reduced modulo `m` (for building Eisenstein series mod a prime).
    pub fn sigma_mod(&self, e: u32, n: usize, m: u64) -> u64 {
        let mut total = 1u64;
        for (p, a) in self.factorize(n) {
            let pe = pow_mod(p as u64 % m, e as u64, m);
            let mut term = 1u64;
            let mut acc = 1u64;
            for _ in 0..a {
                term = term * pe % m;
                acc = (acc + term) % m;
            }
            total = total * acc % m;
        }
        total
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}
