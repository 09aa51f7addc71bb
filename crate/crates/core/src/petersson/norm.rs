//! Petersson norm ⟨f, f⟩ = ∫_F y^k |f(z)|² dx dy / y² over the standard
//! fundamental domain.
//!
//! Everything is computed for the normalized quantity
//! 𝒩(f) = 2π²(4π)^{k−1}⟨f, f⟩ / Γ(k), which is O(1) for every weight. The
//! strip y ≥ 1 is integrated exactly by Parseval,
//! 𝒩_upper = (2π²/(k−1)) Σ λ(n)² Q(k−1, 4πn),
//! and the region √(1−x²) ≤ y ≤ 1 by tensor Gauss–Legendre with
//! 𝒩_lower = ∫∫ 2π² |Σ b_n(y) e(nx)|² / y dx dy,
//! b_n(y) = λ(n) (4πny)^{(k−1)/2} e^{−2πny} / Γ(k)^{1/2}.

use crate::error::{domain, Error, Result};
use crate::numeric::{gauss_legendre, ln_gamma, KahanSum};
use crate::qarith::HeckeEigenform;
use std::f64::consts::{PI, TAU};

const Y_MIN: f64 = 0.866_025_403_784_438_6;

/// Regularized upper incomplete gamma Q(a, x) for integer a ≥ 1:
/// e^{−x} Σ_{j<a} x^j/j!.
pub(crate) fn q_integer(a: u32, x: f64) -> f64 {
    let lx = x.ln();
    let mut s = KahanSum::new();
    let mut t = -x;
    for j in 0..a {
        if j > 0 {
            t += lx - (j as f64).ln();
        }
        if t > -745.0 {
            s.add(t.exp());
        }
    }
    s.value().min(1.0)
}

fn ln_amplitude(k: u32, n: usize, y: f64, ln_gamma_k: f64) -> f64 {
    let half = (k as f64 - 1.0) / 2.0;
    half * (4.0 * PI * n as f64 * y).ln() - TAU * n as f64 * y - 0.5 * ln_gamma_k
}

/// Largest value of ln b̂_n(y) over y ∈ [√3/2, 1].
fn ln_amplitude_max(k: u32, n: usize, ln_gamma_k: f64) -> f64 {
    let peak = (k as f64 - 1.0) / (4.0 * PI * n as f64);
    let y = peak.clamp(Y_MIN, 1.0);
    ln_amplitude(k, n, y, ln_gamma_k)
}

/// Table length beyond which the neglected terms (bounded through
/// |λ(n)| ≤ d(n) ≤ 2√n) change 𝒩 by less than `abs_err`.
fn required_terms(k: u32, abs_err: f64) -> usize {
    let lgk = ln_gamma(k as f64);
    let ln_target = abs_err.ln() - 8.0;
    let start = ((k as f64 - 1.0) / (4.0 * PI * Y_MIN)).ceil() as usize + 1;
    let mut m = start;
    loop {
        let ln_b = ln_amplitude_max(k, m, lgk) + (2.0 * (m as f64).sqrt()).ln();
        let ln_q = (4.0 * m as f64).ln() + q_integer(k - 1, 4.0 * PI * m as f64).max(1e-300).ln();
        if ln_b < ln_target && ln_q < ln_target {
            return m;
        }
        m += 1;
    }
}

/// Breakdown of the normalized norm 𝒩(f).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedNorm {
    pub lower: f64,
    pub upper: f64,
    pub terms: usize,
    /// Quadrature panels in x at convergence.
    pub panels: usize,
}

impl NormalizedNorm {
    pub fn total(&self) -> f64 {
        self.lower + self.upper
    }
}

fn lower_region(f: &HeckeEigenform, terms: usize, panels: usize, order: usize) -> f64 {
    let k = f.weight();
    let lgk = ln_gamma(k as f64);
    let rule = gauss_legendre(order);
    let width = 0.5 / panels as f64;
    let mut total = KahanSum::new();
    let mut b = vec![0.0; terms + 1];
    for p in 0..panels {
        let x0 = p as f64 * width;
        for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
            let x = x0 + 0.5 * width * (xi + 1.0);
            let wx = 0.5 * width * wx;
            let ylo = (1.0 - x * x).sqrt();
            let (s1, c1) = (TAU * x).sin_cos();
            let step = (c1, s1);
            let mut inner = KahanSum::new();
            for (yi, wy) in rule.nodes.iter().zip(&rule.weights) {
                let y = ylo + 0.5 * (1.0 - ylo) * (yi + 1.0);
                let wy = 0.5 * (1.0 - ylo) * wy;
                for n in 1..=terms {
                    b[n] = f.lambda(n) * ln_amplitude(k, n, y, lgk).exp();
                }
                // Σ b_n e(nx) via the rotation e(x)^n
                let (mut re, mut im) = (0.0, 0.0);
                let (mut cr, mut ci) = step;
                for &bn in &b[1..=terms] {
                    re += bn * cr;
                    im += bn * ci;
                    let nr = cr * step.0 - ci * step.1;
                    ci = cr * step.1 + ci * step.0;
                    cr = nr;
                }
                inner.add(wy * (re * re + im * im) / y);
            }
            total.add(wx * inner.value());
        }
    }
    // both halves x < 0 and x > 0
    2.0 * 2.0 * PI * PI * total.value()
}

fn upper_region(f: &HeckeEigenform, terms: usize) -> f64 {
    let k = f.weight();
    let mut s = KahanSum::new();
    for n in 1..=terms {
        s.add(f.lambda(n).powi(2) * q_integer(k - 1, 4.0 * PI * n as f64));
    }
    2.0 * PI * PI / (k as f64 - 1.0) * s.value()
}

/// 𝒩(f) = 2π²(4π)^{k−1}⟨f, f⟩/Γ(k) to relative accuracy `tol`.
pub fn normalized_petersson_norm(f: &HeckeEigenform, tol: f64) -> Result<NormalizedNorm> {
    if !(tol > 0.0) {
        return domain("petersson_norm: tolerance must be positive");
    }
    let k = f.weight();
    if k < 4 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    let terms = required_terms(k, 5e-3 * tol);
    f.require(terms)?;
    let upper = upper_region(f, terms);
    let order = 24;
    let mut panels = 2;
    let mut prev = lower_region(f, terms, panels, order);
    loop {
        panels *= 2;
        let cur = lower_region(f, terms, panels, order);
        if (cur - prev).abs() <= 0.1 * tol * (cur + upper) || panels >= 256 {
            return Ok(NormalizedNorm { lower: cur, upper, terms, panels });
        }
        prev = cur;
    }
}

/// ln⟨f, f⟩ (the norm itself overflows f64 for weights in the hundreds).
pub fn petersson_norm_ln(f: &HeckeEigenform, tol: f64) -> Result<f64> {
    let k = f.weight() as f64;
    let n = normalized_petersson_norm(f, tol)?;
    Ok(n.total().ln() + ln_gamma(k) - (2.0 * PI * PI).ln() - (k - 1.0) * (4.0 * PI).ln())
}

/// Petersson norm ⟨f, f⟩ with the λ(1) = 1 normalization, relative accuracy `tol`.
pub fn petersson_norm(f: &HeckeEigenform, tol: f64) -> Result<f64> {
    let ln = petersson_norm_ln(f, tol)?;
    if ln > 709.0 {
        return Err(Error::Domain(format!(
            "petersson_norm: ⟨f,f⟩ = e^{ln:.1} overflows; use petersson_norm_ln"
        )));
    }
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::delta_eigenform;

    #[test]
    fn incomplete_gamma_integer_order() {
        assert!((q_integer(1, 2.0) / (-2.0f64).exp() - 1.0).abs() < 1e-15);
        // Q(3, x) = e^{-x}(1 + x + x²/2)
        let x = 7.5f64;
        assert!((q_integer(3, x) / ((-x).exp() * (1.0 + x + x * x / 2.0)) - 1.0).abs() < 1e-14);
        assert!((q_integer(11, 0.01) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_norm_against_reference() {
        // ⟨Δ, Δ⟩ = 1.0353620568043209223478168122e-6
        let f = delta_eigenform(100);
        let v = petersson_norm(&f, 1e-10).unwrap();
        assert!((v / 1.035_362_056_804_320_9e-6 - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn stable_under_table_doubling() {
        let a = petersson_norm(&delta_eigenform(60), 1e-8).unwrap();
        let b = petersson_norm(&delta_eigenform(120), 1e-8).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn invariant_under_quadrature_doubling() {
        let f = delta_eigenform(60);
        let n = normalized_petersson_norm(&f, 1e-10).unwrap();
        let denser = lower_region(&f, n.terms, 2 * n.panels, 48);
        assert!((denser - n.lower).abs() <= 1e-10 * n.total());
    }

    #[test]
    fn short_table_is_reported() {
        let err = petersson_norm(&delta_eigenform(3), 1e-8).unwrap_err();
        assert!(matches!(err, Error::InsufficientTable { available: 3, .. }));
    }
}
