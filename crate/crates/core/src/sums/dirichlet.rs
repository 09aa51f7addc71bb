use crate::error::{domain, Result};
use crate::qarith::HeckeEigenform;
use crate::special::primes_up_to;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An evaluation point s = re + i·im.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(s: ComplexPoint) -> Self {
        Complex64::new(s.re, s.im)
    }
}

/// Partial sum of D_f(s, h) with a rigorous bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletValue {
    pub value: Complex64,
    /// Bound on |D_f(s,h) − value|; infinite when no bound could be certified.
    pub tail_bound: f64,
    pub terms: usize,
}

/// C(δ) = Π_p max_{a≥0} (a+1)/p^{aδ}, so that d(n) ≤ C(δ)·n^δ for every n.
fn divisor_constant(delta: f64) -> f64 {
    let limit = 2f64.powf(1.0 / delta).ceil() as usize;
    let mut c = 1.0;
    for p in primes_up_to(limit) {
        let lp = (p as f64).ln();
        let mut best: f64 = 1.0;
        for a in 1..200 {
            let v = (a as f64 + 1.0).ln() - a as f64 * delta * lp;
            best = best.max(v.exp());
            if v < 0.0 && a as f64 * delta * lp > 50.0 {
                break;
            }
        }
        c *= best;
    }
    c
}

/// Σ_{n>N, m=n+h} d(n)d(m)(nm)^{(k−1)/2}/(2m)^{σ+k−1}
///   ≤ C(δ)² 2^{−(σ+k−1)} Σ_{m>N+h} m^{2δ−σ}
///   ≤ C(δ)² 2^{−(σ+k−1)} (N+h)^{1+2δ−σ}/(σ−1−2δ),
/// minimized over δ = 1/j with 2δ < σ − 1.
fn tail_bound(k: u32, sigma: f64, h: usize, n_terms: usize) -> f64 {
    let base = (n_terms + h) as f64;
    let mut best = f64::INFINITY;
    for j in 3..=16 {
        let delta = 1.0 / j as f64;
        let margin = sigma - 1.0 - 2.0 * delta;
        if margin <= 0.0 {
            continue;
        }
        let c = divisor_constant(delta);
        let ln_b = 2.0 * c.ln() - (sigma + k as f64 - 1.0) * std::f64::consts::LN_2
            - margin * base.ln()
            - margin.ln();
        best = best.min(ln_b.exp());
    }
    best
}

/// Partial sum over n ≤ N_terms of
/// D_f(s, h) = Σ_{m−n=h} λ(m)λ(n)(nm)^{(k−1)/2}/(n+m+h)^{s+k−1}, Re(s) > 1.
///
/// Only the region of absolute convergence is covered; the meromorphic
/// continuation is not implemented.
pub fn dirichlet_series(f: &HeckeEigenform, s: ComplexPoint, h: usize, n_terms: usize) -> Result<DirichletValue> {
    if !(s.re > 1.0) || !s.im.is_finite() {
        return domain(format!("D_f(s,h) is evaluated only for Re(s) > 1, got s = {} + {}i", s.re, s.im));
    }
    if h == 0 {
        return domain("shift h must be positive");
    }
    f.require(n_terms + h)?;
    let lam = f.table();
    let e = (f.weight() as f64 - 1.0) / 2.0;
    let expo = Complex64::new(s.re + f.weight() as f64 - 1.0, s.im);
    let mut re = crate::numeric::KahanSum::new();
    let mut im = crate::numeric::KahanSum::new();
    for n in 1..=n_terms {
        let m = n + h;
        let ln_denom = ((n + m + h) as f64).ln();
        let ln_term = Complex64::new(e * ((n as f64).ln() + (m as f64).ln()), 0.0) - expo * ln_denom;
        let t = ln_term.exp() * (lam[m - 1] * lam[n - 1]);
        re.add(t.re);
        im.add(t.im);
    }
    Ok(DirichletValue {
        value: Complex64::new(re.value(), im.value()),
        tail_bound: tail_bound(f.weight(), s.re, h, n_terms),
        terms: n_terms,
    })
}
