//! Multi-prime number-theoretic transforms.
//!
//! Primes have the form p = c·2^20 + 1 with 2^30 < p < 2^31, so a transform of
//! length up to 2^20 exists modulo each of them. Residues are plain integers in
//! [0, p); twiddles are stored in Montgomery form so a single reduction yields
//! a plain product.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use std::sync::OnceLock;

const MAX_LOG_LEN: u32 = 20;
/// Longest cyclic transform available.
pub(crate) const MAX_LEN: usize = 1 << MAX_LOG_LEN;
const SCHOOLBOOK_BELOW: usize = 48;

#[derive(Clone, Debug)]
pub(crate) struct NttPrime {
    pub p: u32,
    /// -p^{-1} mod 2^32
    n_prime: u32,
    /// 2^64 mod p
    r2: u32,
    /// primitive 2^20-th root of unity
    root: u32,
}

impl NttPrime {
    fn new(p: u32) -> Self {
        let mut inv: u32 = 1;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u64 << 32) % p as u64) as u32;
        let r2 = ((r as u64 * r as u64) % p as u64) as u32;
        let g = primitive_root(p);
        let root = pow_plain(g, (p as u64 - 1) >> MAX_LOG_LEN, p);
        Self { p, n_prime: inv.wrapping_neg(), r2, root }
    }

    #[inline(always)]
    fn redc(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.n_prime);
        let u = ((t + m as u64 * self.p as u64) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn mont_mul(&self, a: u32, b: u32) -> u32 {
        self.redc(a as u64 * b as u64)
    }

    #[inline(always)]
    fn to_mont(&self, a: u32) -> u32 {
        self.mont_mul(a, self.r2)
    }

    #[inline(always)]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// Plain product a·b mod p.
    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, b: u32, e: u64) -> u32 {
        pow_plain(b, e, self.p)
    }

    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.pow(a, self.p as u64 - 2)
    }

    /// Reduces a signed big integer modulo p.
    pub fn reduce(&self, digits: &[u32], negative: bool) -> u32 {
        let mut r = 0u64;
        for &d in digits.iter().rev() {
            r = ((r << 32) | d as u64) % self.p as u64;
        }
        let r = r as u32;
        if negative && r != 0 {
            self.p - r
        } else {
            r
        }
    }

    pub fn reduce_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// Twiddle table (Montgomery form): tw[len + j] = w_{2len}^j.
    fn twiddles(&self, n: usize, inverse: bool) -> Vec<u32> {
        let mut w = self.pow(self.root, (MAX_LEN / n) as u64);
        if inverse {
            w = self.inv(w);
        }
        let mut tw = vec![0u32; n.max(2)];
        let half = n / 2;
        let wm = self.to_mont(w);
        let mut cur = self.to_mont(1);
        for j in 0..half {
            tw[half + j] = cur;
            cur = self.mont_mul(cur, wm);
        }
        let mut len = half / 2;
        while len >= 1 {
            for j in 0..len {
                tw[len + j] = tw[2 * len + 2 * j];
            }
            len /= 2;
        }
        tw
    }

    fn forward(&self, a: &mut [u32], tw: &[u32]) {
        let n = a.len();
        let mut len = n / 2;
        while len >= 1 {
            for block in a.chunks_exact_mut(2 * len) {
                let (lo, hi) = block.split_at_mut(len);
                for j in 0..len {
                    let u = lo[j];
                    let v = hi[j];
                    lo[j] = self.add(u, v);
                    hi[j] = self.mont_mul(self.sub(u, v), tw[len + j]);
                }
            }
            len /= 2;
        }
    }

    fn inverse(&self, a: &mut [u32], tw: &[u32]) {
        let n = a.len();
        let mut len = 1;
        while len < n {
            for block in a.chunks_exact_mut(2 * len) {
                let (lo, hi) = block.split_at_mut(len);
                for j in 0..len {
                    let u = lo[j];
                    let v = self.mont_mul(hi[j], tw[len + j]);
                    lo[j] = self.add(u, v);
                    hi[j] = self.sub(u, v);
                }
            }
            len *= 2;
        }
    }

    /// Truncated product of two residue polynomials, first `out_len` terms.
    pub fn mul_poly(&self, a: &[u32], b: &[u32], out_len: usize) -> Vec<u32> {
        let a = &a[..a.len().min(out_len)];
        let b = &b[..b.len().min(out_len)];
        if a.is_empty() || b.is_empty() || out_len == 0 {
            return vec![0; out_len];
        }
        if a.len().min(b.len()) <= SCHOOLBOOK_BELOW {
            return self.mul_schoolbook(a, b, out_len);
        }
        let n = (a.len() + b.len() - 1).next_power_of_two();
        if n > MAX_LEN {
            return self.mul_chunked(a, b, out_len);
        }
        let tw = self.twiddles(n, false);
        let itw = self.twiddles(n, true);
        let mut fa = vec![0u32; n];
        fa[..a.len()].copy_from_slice(a);
        self.forward(&mut fa, &tw);
        let same = std::ptr::eq(a, b);
        if same {
            for x in fa.iter_mut() {
                *x = self.mont_mul(*x, *x);
            }
        } else {
            let mut fb = vec![0u32; n];
            fb[..b.len()].copy_from_slice(b);
            self.forward(&mut fb, &tw);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = self.mont_mul(*x, *y);
            }
        }
        self.inverse(&mut fa, &itw);
        // pointwise products carry a factor R^{-1}; fold it into 1/n
        let scale = self.mul(self.inv(n as u32 % self.p), self.r2);
        fa.truncate(out_len);
        for x in fa.iter_mut() {
            *x = self.mont_mul(*x, scale);
        }
        fa.resize(out_len, 0);
        fa
    }

    fn mul_schoolbook(&self, a: &[u32], b: &[u32], out_len: usize) -> Vec<u32> {
        let mut out = vec![0u32; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(out_len.saturating_sub(i)) {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        out
    }

    fn mul_chunked(&self, a: &[u32], b: &[u32], out_len: usize) -> Vec<u32> {
        let s = MAX_LEN / 2;
        let mut out = vec![0u32; out_len];
        for (i, ca) in a.chunks(s).enumerate() {
            for (j, cb) in b.chunks(s).enumerate() {
                let off = (i + j) * s;
                if off >= out_len {
                    continue;
                }
                let part = self.mul_poly(ca, cb, out_len - off);
                for (t, v) in part.into_iter().enumerate() {
                    out[off + t] = self.add(out[off + t], v);
                }
            }
        }
        out
    }
}

fn pow_plain(mut b: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1u64;
    let mut bb = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % p as u64;
        }
        bb = bb * bb % p as u64;
        e >>= 1;
    }
    b = r as u32;
    b
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn primitive_root(p: u32) -> u32 {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_plain(g, (phi / q) as u64, p) != 1))
        .expect("prime has a primitive root")
}

/// All transform primes, largest first.
pub(crate) fn primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        (1024u32..2048)
            .rev()
            .map(|c| (c << MAX_LOG_LEN) + 1)
            .filter(|&p| is_prime_u32(p))
            .map(NttPrime::new)
            .collect()
    })
}

/// Chinese remaindering over the first `m` transform primes into the
/// symmetric residue range.
pub(crate) struct Crt {
    moduli: Vec<u32>,
    /// inv[j][i] = p_i^{-1} mod p_j for i < j
    inv: Vec<Vec<u32>>,
    modulus: BigUint,
    half: BigUint,
}

impl Crt {
    pub fn new(m: usize) -> Self {
        let ps = &primes()[..m];
        let moduli: Vec<u32> = ps.iter().map(|q| q.p).collect();
        let inv = (0..m)
            .map(|j| (0..j).map(|i| ps[j].inv(moduli[i] % moduli[j])).collect())
            .collect();
        let modulus = moduli.iter().fold(BigUint::from(1u32), |acc, &p| acc * p);
        let half = &modulus >> 1;
        Self { moduli, inv, modulus, half }
    }

    /// Reconstructs the unique x with |x| ≤ M/2 from residues r_i = x mod p_i.
    pub fn reconstruct(&self, residues: &[u32]) -> BigInt {
        let m = self.moduli.len();
        debug_assert_eq!(residues.len(), m);
        let mut y = vec![0u64; m];
        for j in 0..m {
            let pj = self.moduli[j] as u64;
            let mut t = residues[j] as u64;
            for i in 0..j {
                t = (t + pj - y[i] % pj) % pj * self.inv[j][i] as u64 % pj;
            }
            y[j] = t;
        }
        // Horner: x = y0 + p0(y1 + p1(y2 + ...))
        let mut limbs: Vec<u32> = vec![y[m - 1] as u32];
        for i in (0..m - 1).rev() {
            let p = self.moduli[i] as u64;
            let mut carry = y[i];
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
        if x > self.half {
            BigInt::from_biguint(Sign::Minus, &self.modulus - x)
        } else {
            BigInt::from_biguint(Sign::Plus, x)
        }
    }
}

fn max_bits(a: &[BigInt]) -> u64 {
    a.iter().map(|x| x.bits()).max().unwrap_or(0)
}

/// Number of transform primes whose product exceeds 2^bits.
pub(crate) fn primes_for_bits(bits: u64) -> usize {
    let mut total = 0f64;
    for (i, q) in primes().iter().enumerate() {
        total += (q.p as f64).log2();
        if total > bits as f64 {
            return i + 1;
        }
    }
    panic!("coefficient size {bits} bits exceeds the transform prime pool");
}

/// Exact truncated product of integer polynomials via multi-prime transforms.
pub(crate) fn mul_bigint(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); out_len];
    }
    if a.len().min(b.len()) <= SCHOOLBOOK_BELOW {
        let mut out = vec![BigInt::zero(); out_len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(out_len.saturating_sub(i)) {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let square = std::ptr::eq(a, b);
    let len_bits = 64 - (a.len().min(b.len()) as u64).leading_zeros() as u64;
    let bits = max_bits(a) + max_bits(b) + len_bits + 2;
    let m = primes_for_bits(bits);
    let digits = |v: &[BigInt]| -> Vec<(Vec<u32>, bool)> {
        v.iter().map(|x| (x.magnitude().to_u32_digits(), x.sign() == Sign::Minus)).collect()
    };
    let da = digits(a);
    let db = if square { Vec::new() } else { digits(b) };
    let res: Vec<Vec<u32>> = primes()[..m]
        .iter()
        .map(|q| {
            let ra: Vec<u32> = da.iter().map(|(d, neg)| q.reduce(d, *neg)).collect();
            if square {
                q.mul_poly(&ra, &ra, out_len)
            } else {
                let rb: Vec<u32> = db.iter().map(|(d, neg)| q.reduce(d, *neg)).collect();
                q.mul_poly(&ra, &rb, out_len)
            }
        })
        .collect();
    let crt = Crt::new(m);
    let mut buf = vec![0u32; m];
    (0..out_len)
        .map(|i| {
            for (t, r) in res.iter().enumerate() {
                buf[t] = r[i];
            }
            crt.reconstruct(&buf)
        })
        .collect()
}
