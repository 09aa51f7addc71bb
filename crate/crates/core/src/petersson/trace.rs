//! Both sides of the Petersson trace formula
//!
//! (2π²/(k−1)) Σ_f λ_f(n₁)λ_f(n₂)/L(1, sym² f)
//!     = δ(n₁, n₂) + 2π(−1)^{k/2} Σ_{c≥1} S(n₁, n₂; c)/c · J_{k−1}(4π√(n₁n₂)/c).

use crate::error::{domain, Error, Result};
use crate::numeric::KahanSum;
use crate::qarith::HeckeEigenform;
use crate::special::{bessel_j, bessel_tail_bound_ln, KloostermanTable};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

/// Process-wide Kloosterman cache shared by all trace-formula evaluations.
pub fn shared_kloosterman() -> &'static KloostermanTable {
    static TABLE: OnceLock<KloostermanTable> = OnceLock::new();
    TABLE.get_or_init(KloostermanTable::new)
}

/// Where to stop the c-sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Sum c ≤ c0 exactly as given.
    Modulus(u64),
    /// Smallest c0 whose certified tail is at most the given bound.
    Tolerance(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFormulaResult {
    /// Kronecker delta term.
    pub diagonal: f64,
    /// Kloosterman–Bessel sum over c ≤ c0, including 2π(−1)^{k/2}.
    pub offdiagonal: f64,
    /// Rigorous bound on the omitted terms c > c0.
    pub tail_bound: f64,
    pub c0: u64,
}

impl TraceFormulaResult {
    pub fn total(&self) -> f64 {
        self.diagonal + self.offdiagonal
    }
}

/// ln of the certified bound on |2π Σ_{c>c0} S/c · J| for √(n₁n₂) = x.
fn ln_tail(k: u32, x: f64, c0: u64) -> Result<f64> {
    Ok(TAU.ln() + bessel_tail_bound_ln(k, x, c0)?)
}

/// Smallest c0 ≥ 1 with certified tail ≤ tol.
pub(crate) fn auto_modulus(k: u32, x: f64, tol: f64) -> Result<u64> {
    if !(tol > 0.0) {
        return domain("trace formula: tail tolerance must be positive");
    }
    let target = tol.ln();
    if ln_tail(k, x, 1)? <= target {
        return Ok(1);
    }
    let mut hi = 2u64;
    while ln_tail(k, x, hi)? > target {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ln_tail(k, x, mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Right-hand side (the geometric side).
pub fn trace_formula_rhs(k: u32, n1: u64, n2: u64, truncation: Truncation) -> Result<TraceFormulaResult> {
    if k % 2 == 1 || k < 4 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if n1 == 0 || n2 == 0 {
        return domain("trace formula: n1 and n2 must be positive");
    }
    let x = ((n1 as f64) * (n2 as f64)).sqrt();
    let c0 = match truncation {
        Truncation::Modulus(c) => c.max(1),
        Truncation::Tolerance(t) => auto_modulus(k, x, t)?,
    };
    let table = shared_kloosterman();
    let mut s = KahanSum::new();
    for c in 1..=c0 {
        let j = bessel_j(k - 1, 4.0 * PI * x / c as f64)?;
        if j == 0.0 {
            continue;
        }
        s.add(table.get(n1, n2, c) / c as f64 * j);
    }
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(TraceFormulaResult {
        diagonal: if n1 == n2 { 1.0 } else { 0.0 },
        offdiagonal: TAU * sign * s.value(),
        tail_bound: ln_tail(k, x, c0)?.exp(),
        c0,
    })
}

/// Left-hand side (the spectral side); every form must carry L(1, sym² f).
pub fn trace_formula_lhs(k: u32, n1: usize, n2: usize, forms: &[HeckeEigenform]) -> Result<f64> {
    let mut s = KahanSum::new();
    for (i, f) in forms.iter().enumerate() {
        if f.weight() != k {
            return domain(format!("trace formula: form {i} has weight {}, expected {k}", f.weight()));
        }
        let l = f
            .sym2_l1
            .ok_or_else(|| Error::MissingData(format!("L(1, sym² f) for form {i} of weight {k}")))?;
        f.require(n1.max(n2))?;
        s.add(f.lambda(n1) * f.lambda(n2) / l);
    }
    Ok(2.0 * PI * PI / (k as f64 - 1.0) * s.value())
}
