//! Integer-order Bessel functions of the first kind, J_ν(x), for ν up to ~10⁴
//! and x up to ~10⁶.
//!
//! Regimes:
//! - ascending series (double-double accumulation) for x ≤ max(12, ν/2);
//! - Hankel's asymptotic expansion once x ≥ max(30, ν²), where its terms
//!   decrease from the start;
//! - for ν ≤ x in between: upward recurrence from J₀, J₁ (stable below the
//!   turning point), with J₀, J₁ from the Hankel expansion;
//! - otherwise Miller's backward recurrence normalized by J₀ + 2ΣJ₂ₘ = 1.

use crate::error::{domain, Result};
use crate::numeric::{ln_gamma, DoubleDouble};
use std::f64::consts::{E, PI};

const LN_UNDERFLOW: f64 = -744.0;
const RESCALE_ABOVE: f64 = 1e250;

/// J_ν(x) for integer order ν ≥ 0 and x ≥ 0.
///
/// Relative accuracy is about 1e-12 where the value is representable; in the
/// deep-decay region values below ~1e-308 flush to zero.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j: argument must be finite and non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let nu = order as f64;
    if x <= (nu / 2.0).max(12.0) {
        return Ok(ascending_series(order, x));
    }
    if x >= (nu * nu).max(30.0) {
        return Ok(hankel(order, x));
    }
    if x >= nu && x >= 30.0 {
        return Ok(upward(order, x));
    }
    Ok(miller(order, x))
}

fn ascending_series(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    let ln_lead = nu * (x / 2.0).ln() - ln_gamma(nu + 1.0);
    if ln_lead < LN_UNDERFLOW - 5.0 {
        return 0.0;
    }
    let q = DoubleDouble::from_prod(x, x).div_f64(4.0);
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    let mut m = 1.0f64;
    loop {
        term = -(term * q).div_f64(m * (m + nu));
        sum += term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
        m += 1.0;
        if m > 10_000.0 {
            break;
        }
    }
    sum.to_f64() * ln_lead.exp()
}

/// χ = x − (ν/2 + 1/4)π reduced modulo 2π in double-double.
fn hankel_phase(order: u32, x: f64) -> f64 {
    const TWO_PI_HI: f64 = std::f64::consts::TAU;
    const TWO_PI_LO: f64 = 2.4492935982947064e-16;
    let k = (x / TWO_PI_HI).round();
    let r = DoubleDouble::from_f64(x)
        - DoubleDouble::from_prod(k, TWO_PI_HI)
        - DoubleDouble::from_prod(k, TWO_PI_LO);
    let eighths = ((2 * order as u64 + 1) % 8) as f64;
    r.to_f64() - PI * eighths / 4.0
}

fn hankel(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..400 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let chi = hankel_phase(order, x);
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn upward(order: u32, x: f64) -> f64 {
    let j0 = hankel(0, x);
    if order == 0 {
        return j0;
    }
    let mut jm1 = j0;
    let mut j = hankel(1, x);
    for m in 1..order {
        let next = (2.0 * m as f64 / x) * j - jm1;
        jm1 = j;
        j = next;
    }
    j
}

fn miller(order: u32, x: f64) -> f64 {
    let top = (order as f64).max(x);
    let start = (top + 30.0 + 12.0 * top.cbrt()).ceil() as u32 + 1;
    let mut jp1 = 0.0f64;
    let mut j = 1e-30f64;
    let mut result = 0.0f64;
    let mut norm = 0.0f64;
    let mut m = start;
    while m > 0 {
        // j holds J_m (unnormalized); step to J_{m-1}
        let jm1 = (2.0 * m as f64 / x) * j - jp1;
        jp1 = j;
        j = jm1;
        m -= 1;
        if m == order {
            result = j;
        }
        if m == 0 {
            norm += j;
        } else if m % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > RESCALE_ABOVE {
            j /= RESCALE_ABOVE;
            jp1 /= RESCALE_ABOVE;
            result /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
        }
    }
    result / norm
}

/// ln of the majorant (e·x / (2(ν+1)))^ν ≥ |J_ν(x)|, valid for all x ≥ 0.
pub fn bessel_j_majorant_ln(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    nu * (E * x / (2.0 * (nu + 1.0))).ln()
}

/// Natural log of a rigorous upper bound on
/// Σ_{c > c0} |S(m,n;c)|/c · |J_{k−1}(4π x_max / c)|
/// using |S| ≤ c and |J_{k−1}(y)| ≤ (e·y/(2k))^{k−1}.
pub fn bessel_tail_bound_ln(k: u32, x_max: f64, c0: u64) -> Result<f64> {
    if k < 4 {
        return domain(format!("bessel_tail_bound: weight {k} < 4 gives a divergent c-sum"));
    }
    if !(x_max >= 0.0) {
        return domain("bessel_tail_bound: x_max must be non-negative");
    }
    if c0 < 1 {
        return domain("bessel_tail_bound: c0 must be at least 1");
    }
    if x_max == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let kf = k as f64;
    let nu = kf - 1.0;
    let base = nu * (E * 4.0 * PI * x_max / (2.0 * kf)).ln();
    // Σ_{c>c0} c^{-(k-1)} ≤ (c0+1)^{-(k-1)} (1 + (c0+1)/(k-2))
    let c1 = (c0 + 1) as f64;
    let tail = -nu * c1.ln() + (1.0 + c1 / (kf - 2.0)).ln();
    Ok(base + tail)
}

/// [`bessel_tail_bound_ln`] exponentiated; may underflow to zero.
pub fn bessel_tail_bound(k: u32, x_max: f64, c0: u64) -> Result<f64> {
    Ok(bessel_tail_bound_ln(k, x_max, c0)?.exp())
}
