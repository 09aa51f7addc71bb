use super::arith::{gcd, mod_inverse};
use crate::numeric::DoubleDouble;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

/// Kloosterman sum S(m, n; c) = Σ_{x mod c, (x,c)=1} e((m x + n x̄)/c).
///
/// Direct enumeration with double-double accumulation. The sum is real; the
/// imaginary part is computed and checked against 1e-10·c before being dropped.
pub fn kloosterman(m: u64, n: u64, c: u64) -> f64 {
    assert!(c >= 1, "kloosterman: modulus must be positive");
    if c == 1 {
        return 1.0;
    }
    let mm = m % c;
    let nn = n % c;
    let cf = c as f64;
    let mut re = DoubleDouble::ZERO;
    let mut im = DoubleDouble::ZERO;
    for x in 1..c {
        if gcd(x, c) != 1 {
            continue;
        }
        let xb = mod_inverse(x, c).expect("unit has an inverse");
        let phase = ((mm as u128 * x as u128 + nn as u128 * xb as u128) % c as u128) as u64;
        let theta = 2.0 * PI * phase as f64 / cf;
        re = re.add_f64(theta.cos());
        im = im.add_f64(theta.sin());
    }
    let im = im.to_f64();
    assert!(
        im.abs() <= 1e-10 * cf,
        "Kloosterman sum S({m},{n};{c}) has imaginary part {im}"
    );
    re.to_f64()
}

/// Memoized Kloosterman sums keyed by (m mod c, n mod c, c).
///
/// Inserts are idempotent, so concurrent recomputation of the same key is
/// harmless.
#[derive(Debug, Default)]
pub struct KloostermanTable {
    entries: RwLock<HashMap<(u64, u64, u64), f64>>,
    max_c: AtomicU64,
}

impl KloostermanTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, m: u64, n: u64, c: u64) -> f64 {
        let (a, b) = (m % c, n % c);
        let key = if a <= b { (a, b, c) } else { (b, a, c) };
        if let Some(v) = self.entries.read().unwrap().get(&key) {
            return *v;
        }
        let v = kloosterman(key.0, key.1, c);
        self.entries.write().unwrap().insert(key, v);
        self.max_c.fetch_max(c, Ordering::Relaxed);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest modulus cached so far.
    pub fn max_c(&self) -> u64 {
        self.max_c.load(Ordering::Relaxed)
    }
}
