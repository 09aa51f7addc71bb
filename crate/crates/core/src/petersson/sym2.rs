//! L(1, sym² f) by three independent routes.

use super::norm::normalized_petersson_norm;
use crate::error::{domain, Error, Result};
use crate::numeric::{linear_fit, ln_gamma_complex, KahanSum, ZETA2};
use crate::qarith::HeckeEigenform;
use crate::special::SmallestFactorSieve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sym2Method {
    /// L(1, sym² f) = (π/2)(4π)^k ⟨f, f⟩ / Γ(k).
    NormIdentity,
    /// Approximate functional equation of the completed L-function.
    SmoothedSeries,
    /// ζ(2) times the least-squares slope of Σ_{n≤X} λ(n)².
    RankinSlope,
}

impl std::str::FromStr for Sym2Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm-identity" => Ok(Self::NormIdentity),
            "smoothed-series" => Ok(Self::SmoothedSeries),
            "rankin-slope" => Ok(Self::RankinSlope),
            other => Err(Error::Config(format!("unknown sym2 method '{other}'"))),
        }
    }
}

/// L(1, sym² f) by the chosen route.
///
/// `tol` is a relative target for the first two routes. The Rankin slope has
/// no certified error; it uses the whole table (at least 2^10 entries) and is
/// accurate to roughly 10⁻³ once the table reaches 2^15.
pub fn sym2_l1(f: &HeckeEigenform, method: Sym2Method, tol: f64) -> Result<f64> {
    match method {
        Sym2Method::NormIdentity => Ok(normalized_petersson_norm(f, tol)?.total()),
        Sym2Method::SmoothedSeries => smoothed_series(f, tol),
        Sym2Method::RankinSlope => rankin_slope(f),
    }
}

/// All three routes side by side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sym2Triangulation {
    pub norm_identity: f64,
    pub smoothed_series: f64,
    pub rankin_slope: f64,
}

impl Sym2Triangulation {
    /// Largest pairwise relative difference.
    pub fn max_relative_spread(&self) -> f64 {
        let v = [self.norm_identity, self.smoothed_series, self.rankin_slope];
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst = worst.max((v[i] - v[j]).abs() / v[i].abs().min(v[j].abs()));
            }
        }
        worst
    }
}

/// Runs every route; fails with the three values if they disagree by more
/// than 10·tol.
pub fn sym2_l1_triangulate(f: &HeckeEigenform, tol: f64) -> Result<Sym2Triangulation> {
    let t = Sym2Triangulation {
        norm_identity: sym2_l1(f, Sym2Method::NormIdentity, tol.min(1e-8))?,
        smoothed_series: sym2_l1(f, Sym2Method::SmoothedSeries, tol)?,
        rankin_slope: sym2_l1(f, Sym2Method::RankinSlope, tol)?,
    };
    if t.max_relative_spread() > 10.0 * tol {
        return Err(Error::RouteDisagreement {
            threshold: 10.0 * tol,
            norm_identity: t.norm_identity,
            smoothed_series: t.smoothed_series,
            rankin_slope: t.rankin_slope,
        });
    }
    Ok(t)
}

/// ζ(2) × least-squares slope of X ↦ Σ_{n≤X} λ(n)² over the 129-point
/// geometric grid X = N·128^{−j/128}, N the table length.
fn rankin_slope(f: &HeckeEigenform) -> Result<f64> {
    let n = f.len();
    if n < 1 << 10 {
        return Err(Error::InsufficientTable { required: 1 << 10, available: n });
    }
    let grid: Vec<usize> =
        (0..=128).rev().map(|j| (n as f64 * 128f64.powf(-j as f64 / 128.0)) as usize).collect();
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    let mut acc = KahanSum::new();
    let mut m = 0;
    for &x in &grid {
        while m < x {
            m += 1;
            acc.add(f.lambda(m).powi(2));
        }
        xs.push(x as f64);
        ys.push(acc.value());
    }
    Ok(ZETA2 * linear_fit(&xs, &ys).slope)
}

/// ln Γ_ℝ(s) = −(s/2) ln π + ln Γ(s/2).
fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s / 2.0 * PI.ln() + ln_gamma_complex(s / 2.0)
}

/// ln γ(s) for Λ(s) = γ(s) L(s, sym² f), γ(s) = Γ_ℝ(s+1)Γ_ℝ(s+k−1)Γ_ℝ(s+k).
fn ln_gamma_factor(k: u32, s: Complex64) -> Complex64 {
    let kf = k as f64;
    ln_gamma_r(s + 1.0) + ln_gamma_r(s + kf - 1.0) + ln_gamma_r(s + kf)
}

/// Weights V_s(x) = (1/2πi)∫_{(c)} γ(s+u)/γ(1) x^{−u} e^{u²} du/u for s ∈ {0, 1},
/// by the trapezoid rule on u = c + it, |t| ≤ 10, step 0.1.
struct CutoffWeights {
    nodes: Vec<(f64, Complex64, Complex64)>,
}

impl CutoffWeights {
    const C: f64 = 2.0;
    const H: f64 = 0.1;

    fn new(k: u32) -> Self {
        let g1 = ln_gamma_factor(k, Complex64::new(1.0, 0.0));
        let nodes = (0..=100)
            .map(|j| {
                let u = Complex64::new(Self::C, j as f64 * Self::H);
                let w = if j == 0 { 0.5 } else { 1.0 };
                let g = |s: f64| (ln_gamma_factor(k, u + s) - g1 + u * u).exp() / u * (w * Self::H / PI);
                (u.im, g(1.0), g(0.0))
            })
            .collect();
        Self { nodes }
    }

    /// (V_1(x), V_0(x))
    fn eval(&self, x: f64) -> (f64, f64) {
        let lx = x.ln();
        // x^{−u_j} = x^{−c} · (x^{−ih})^j
        let rot = Complex64::from_polar(1.0, -Self::H * lx);
        let mut xu = Complex64::new((-Self::C * lx).exp(), 0.0);
        let mut v1 = 0.0;
        let mut v0 = 0.0;
        for (_, g1, g0) in &self.nodes {
            v1 += (g1 * xu).re;
            v0 += (g0 * xu).re;
            xu *= rot;
        }
        (v1, v0)
    }
}

/// λ(l²) for 1 ≤ l ≤ m from the prime eigenvalues via the Hecke recursion.
fn lambda_of_squares(f: &HeckeEigenform, m: usize, sieve: &SmallestFactorSieve) -> Vec<f64> {
    let mut out = vec![1.0; m + 1];
    for l in 2..=m {
        let mut v = 1.0;
        for (p, e) in sieve.factorize(l) {
            // λ(p^{j+1}) = λ(p)λ(p^j) − λ(p^{j−1})
            let lp = f.lambda(p);
            let (mut prev, mut cur) = (1.0, lp);
            for _ in 1..(2 * e) {
                let next = lp * cur - prev;
                prev = cur;
                cur = next;
            }
            v *= cur;
        }
        out[l] = v;
    }
    out
}

fn smoothed_series(f: &HeckeEigenform, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain("sym2_l1: tolerance must be positive");
    }
    let w = CutoffWeights::new(f.weight());
    let (a1, a0) = w.eval(1.0);
    let scale = (a1 + a0).abs().max(1e-300);
    // cutoff once x·(|V_1|/x + |V_0|) drops below tol/100 relative
    let mut x = 16.0f64;
    loop {
        let (v1, v0) = w.eval(x);
        if ((v1 / x).abs() + v0.abs()) * x < 1e-2 * tol * scale {
            break;
        }
        x *= 1.25;
        if x > 1e9 {
            return domain("sym2_l1: smoothed series does not converge");
        }
    }
    let m = x.ceil() as usize;
    f.require(m)?;
    let sieve = SmallestFactorSieve::new(m.max(2));
    let lsq = lambda_of_squares(f, m, &sieve);
    // A(n) = Σ_{a² l = n} λ(l²)
    let mut coeff = vec![0.0; m + 1];
    let mut a = 1;
    while a * a <= m {
        for l in 1..=m / (a * a) {
            coeff[a * a * l] += lsq[l];
        }
        a += 1;
    }
    let mut s = KahanSum::new();
    for (n, &c) in coeff.iter().enumerate().skip(1) {
        if c == 0.0 {
            continue;
        }
        let (v1, v0) = w.eval(n as f64);
        s.add(c * (v1 / n as f64 + v0));
    }
    Ok(s.value())
}
