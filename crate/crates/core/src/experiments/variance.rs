use crate::error::{domain, Error, Result};
use crate::numeric::{linear_fit, par_map, KahanSum};
use crate::petersson::{shared_kloosterman, sym2_l1, Sym2Method};
use crate::qarith::{dim_cusp_forms, hecke_eigenforms, HeckeEigenform};
use crate::special::{bessel_j, bessel_tail_bound_ln, divisors, gcd, sigma};
use crate::sums::{smooth_sum, Window, WindowKind};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};

/// B_{h1,h2}(W1, W2) = σ₁((h1,h2)) ∫₀^∞ W1(h1 y) W2(h2 y) dy.
pub fn main_term(h1: u64, h2: u64, w1: &Window, w2: &Window) -> Result<f64> {
    if h1 == 0 || h2 == 0 {
        return domain("shifts must be positive");
    }
    let s = sigma(1, gcd(h1, h2))?.to_f64().unwrap_or(f64::INFINITY);
    Ok(s * w1.product_integral(h1 as f64, w2, h2 as f64))
}

/// All positive (r1, r2) with r1(r1 + d1) = r2(r2 + d2), d1 ≠ d2.
///
/// (2r1+d1)² − (2r2+d2)² = d1² − d2², so each solution comes from a
/// factorization u·v = d1² − d2² with v = (2r1+d1) + (2r2+d2) > 0.
pub fn diagonal_solutions(d1: u64, d2: u64) -> Result<Vec<(u64, u64)>> {
    if d1 == 0 || d2 == 0 {
        return domain("diagonal_solutions: d1, d2 must be positive");
    }
    if d1 == d2 {
        return domain("diagonal_solutions: d1 = d2 gives the infinite family r1 = r2");
    }
    let dd = (d1 as i128).pow(2) - (d2 as i128).pow(2);
    let sign = dd.signum();
    let mut out = Vec::new();
    for e in divisors(dd.unsigned_abs() as u64) {
        let u = sign * e as i128;
        let v = dd / u;
        if (u + v) % 2 != 0 {
            continue;
        }
        let a = (u + v) / 2;
        let b = (v - u) / 2;
        let (d1i, d2i) = (d1 as i128, d2 as i128);
        if a > d1i && b > d2i && (a - d1i) % 2 == 0 && (b - d2i) % 2 == 0 {
            out.push((((a - d1i) / 2) as u64, ((b - d2i) / 2) as u64));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Terms (m = r(r+d), W((h/d)(r + d/2)/X)) for one divisor d of h, r ≥ 1.
fn window_terms(h: u64, d: u64, w: &Window, x: f64) -> Vec<(u64, u64, f64)> {
    let (a, b) = w.support();
    let scale = h as f64 / (d as f64 * x);
    let half = d as f64 / 2.0;
    let lo = ((a / scale - half).ceil().max(1.0)) as u64;
    let hi_f = (b / scale - half).floor();
    if hi_f < 1.0 {
        return Vec::new();
    }
    let hi = hi_f as u64;
    (lo.saturating_sub(1).max(1)..=hi + 1)
        .filter_map(|r| {
            let v = w.eval(scale * (r as f64 + half));
            (v != 0.0).then_some((r, r * (r + d), v))
        })
        .collect()
}

/// Petersson-side evaluation of Σ_f ω_f A_f^{W1}(h1, X) A_f^{W2}(h2, X).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeterssonVariance {
    /// Kronecker-delta terms: d1 = d2 ranges plus sporadic solutions.
    pub diagonal: f64,
    /// Kloosterman–Bessel terms over c ≤ c0 (per pair).
    pub offdiagonal: f64,
    /// Rigorous bound on the omitted c-tails.
    pub tail_bound: f64,
    /// Largest modulus used.
    pub c0_max: u64,
}

impl PeterssonVariance {
    pub fn total(&self) -> f64 {
        self.diagonal + self.offdiagonal
    }
}

fn diagonal_part(h1: u64, h2: u64, w1: &Window, w2: &Window, x: f64) -> Result<f64> {
    let mut acc = KahanSum::new();
    let counting = w1.kind == WindowKind::SharpCutoff && w2.kind == WindowKind::SharpCutoff;
    for d1 in divisors(h1) {
        for d2 in divisors(h2) {
            if d1 == d2 {
                let t1 = window_terms(h1, d1, w1, x);
                if counting {
                    let t2 = window_terms(h2, d2, w2, x);
                    let lo = t1.first().map(|t| t.0).max(t2.first().map(|t| t.0));
                    let hi = t1.last().map(|t| t.0).min(t2.last().map(|t| t.0));
                    if let (Some(lo), Some(hi)) = (lo, hi) {
                        if hi >= lo {
                            acc.add((hi - lo + 1) as f64 * w1.height * w2.height);
                        }
                    }
                } else {
                    let s2 = h2 as f64 / (d2 as f64 * x);
                    for (r, _, v1) in t1 {
                        acc.add(v1 * w2.eval(s2 * (r as f64 + d2 as f64 / 2.0)));
                    }
                }
            } else {
                let s1 = h1 as f64 / (d1 as f64 * x);
                let s2 = h2 as f64 / (d2 as f64 * x);
                for (r1, r2) in diagonal_solutions(d1, d2)? {
                    let v = w1.eval(s1 * (r1 as f64 + d1 as f64 / 2.0)) * w2.eval(s2 * (r2 as f64 + d2 as f64 / 2.0));
                    acc.add(v);
                }
            }
        }
    }
    Ok(acc.value())
}

fn merged_terms(h: u64, w: &Window, x: f64) -> Vec<(u64, f64)> {
    let mut by_m: BTreeMap<u64, f64> = BTreeMap::new();
    for d in divisors(h) {
        for (_, m, v) in window_terms(h, d, w, x) {
            *by_m.entry(m).or_insert(0.0) += v;
        }
    }
    by_m.into_iter().collect()
}

/// Smallest c0 with 2π·|w|·tail(k, x, c0) ≤ target.
fn pair_modulus(k: u32, x: f64, weight: f64, target: f64) -> Result<(u64, f64)> {
    let ln_w = TAU.ln() + weight.ln();
    let goal = target.ln();
    let tail = |c: u64| -> Result<f64> { Ok(ln_w + bessel_tail_bound_ln(k, x, c)?) };
    if tail(1)? <= goal {
        return Ok((1, tail(1)?.exp()));
    }
    let mut hi = 2u64;
    while tail(hi)? > goal {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if tail(mid)? <= goal {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, tail(hi)?.exp()))
}

/// Σ_{d1|h1, d2|h2} Σ_{r1,r2} W1 W2 · [δ(m1 = m2) + 2π(−1)^{k/2} Σ_c S(m1,m2;c)/c J_{k−1}(4π√(m1m2)/c)]
/// with m_i = r_i(r_i + d_i); the total omitted tail is at most `tol`.
pub fn variance_lhs_petersson(
    k: u32,
    h1: u64,
    h2: u64,
    w1: &Window,
    w2: &Window,
    x: f64,
    tol: f64,
) -> Result<PeterssonVariance> {
    if k % 2 == 1 || k < 4 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if h1 == 0 || h2 == 0 {
        return domain("shifts must be positive");
    }
    if !(x > 0.0) || !(tol > 0.0) {
        return domain("X and tol must be positive");
    }
    let diagonal = diagonal_part(h1, h2, w1, w2, x)?;
    let t1 = merged_terms(h1, w1, x);
    let t2 = merged_terms(h2, w2, x);
    let pairs = (t1.len() * t2.len()).max(1) as f64;
    let share = tol / pairs;
    let kl = shared_kloosterman();
    let mut bessel_cache: HashMap<(u64, u64), f64> = HashMap::new();
    let mut off = KahanSum::new();
    let mut tail = KahanSum::new();
    let mut c0_max = 0;
    for &(m1, v1) in &t1 {
        for &(m2, v2) in &t2 {
            let weight = (v1 * v2).abs();
            if weight == 0.0 {
                continue;
            }
            let prod = m1 * m2;
            let xs = (prod as f64).sqrt();
            let (c0, t) = pair_modulus(k, xs, weight, share)?;
            c0_max = c0_max.max(c0);
            tail.add(t);
            let mut s = KahanSum::new();
            for c in 1..=c0 {
                let j = match bessel_cache.get(&(prod, c)) {
                    Some(&j) => j,
                    None => {
                        let j = bessel_j(k - 1, 4.0 * PI * xs / c as f64)?;
                        bessel_cache.insert((prod, c), j);
                        j
                    }
                };
                if j != 0.0 {
                    s.add(kl.get(m1, m2, c) / c as f64 * j);
                }
            }
            off.add(v1 * v2 * s.value());
        }
    }
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(PeterssonVariance {
        diagonal,
        offdiagonal: TAU * sign * off.value(),
        tail_bound: tail.value(),
        c0_max,
    })
}

/// (2π²/(k−1)) Σ_f A_f^{W1}(h1, X) A_f^{W2}(h2, X) / L(1, sym² f).
pub fn variance_lhs_eigen(
    k: u32,
    h1: u64,
    h2: u64,
    w1: &Window,
    w2: &Window,
    x: f64,
    forms: &[HeckeEigenform],
) -> Result<f64> {
    let mut acc = KahanSum::new();
    for (i, f) in forms.iter().enumerate() {
        if f.weight() != k {
            return domain(format!("form {i} has weight {}, expected {k}", f.weight()));
        }
        let l = f
            .sym2_l1
            .ok_or_else(|| Error::MissingData(format!("L(1, sym² f) for form {i} of weight {k}")))?;
        let a1 = smooth_sum(f, x, h1 as usize, w1)?;
        let a2 = smooth_sum(f, x, h2 as usize, w2)?;
        acc.add(a1 * a2 / l);
    }
    Ok(2.0 * PI * PI / (k as f64 - 1.0) * acc.value())
}

/// Inputs of a variance run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceConfig {
    pub k: u32,
    pub h1: u64,
    pub h2: u64,
    pub w1: Window,
    pub w2: Window,
    pub x_grid: Vec<f64>,
    /// Certified off-diagonal tail target per X.
    pub tail_tol: f64,
    /// Largest weight for which the eigenform route also runs.
    pub k_eigen_max: u32,
    /// Relative tolerance declared for the agreement of the two routes.
    pub route_tol: f64,
    /// Worker budget for the per-X evaluations.
    pub threads: usize,
}

impl VarianceConfig {
    pub fn new(k: u32, h1: u64, h2: u64, w: Window, x_grid: Vec<f64>) -> Self {
        Self { k, h1, h2, w1: w, w2: w, x_grid, tail_tol: 1e-12, k_eigen_max: 60, route_tol: 1e-3, threads: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k % 2 == 1 || self.k < 4 {
            return Err(Error::Config(format!("weight must be even and at least 4, got {}", self.k)));
        }
        if self.h1 == 0 || self.h2 == 0 {
            return Err(Error::Config("shifts must be positive".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.x_grid.is_empty() || self.x_grid.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Config("X-grid must be non-empty and positive".into()));
        }
        if !(self.tail_tol > 0.0) || !(self.route_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        for w in [&self.w1, &self.w2] {
            if w.support().1 < 1.0 {
                return Err(Error::Config(format!("window upper endpoint A_W = {} must be at least 1", w.support().1)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub x: f64,
    pub lhs_eigen: Option<f64>,
    pub lhs_petersson: f64,
    pub diagonal: f64,
    pub offdiagonal: f64,
    pub tail_bound: f64,
    pub c0_max: u64,
    /// B·X.
    pub main_term: f64,
    /// lhs_petersson − B·X.
    pub residual: f64,
    /// |lhs_eigen − lhs_petersson| when both routes ran.
    pub route_gap: Option<f64>,
    /// h_i < 2a_{W_i}X for both shifts: the r-sums extend to ℤ without change.
    pub extension_exact: bool,
    /// Extra O(h) allowance applied to the residual outside the guard.
    pub extra_allowance: f64,
    /// X ≤ √k/2 and A_{W1}A_{W2}X ≤ √k/2.
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub k: u32,
    pub h1: u64,
    pub h2: u64,
    pub w1: Window,
    pub w2: Window,
    /// B_{h1,h2}(W1, W2).
    pub main_term_constant: f64,
    pub route_tol: f64,
    pub points: Vec<VariancePoint>,
    pub max_abs_residual: f64,
    pub median_abs_residual: f64,
    /// Least-squares slope of residual against X.
    pub residual_slope: f64,
    /// Every route gap within route_tol·(1 + |lhs|).
    pub routes_agree: Option<bool>,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Eigenforms of weight k with λ up to at least n and L(1, sym² f) attached
/// (the table is extended if the norm computation needs more terms).
pub fn eigenforms_with_l_values(k: u32, n: usize) -> Result<Vec<HeckeEigenform>> {
    if dim_cusp_forms(k) == 0 {
        return Ok(Vec::new());
    }
    let mut len = n.max(2);
    loop {
        let attached: Result<Vec<HeckeEigenform>> = hecke_eigenforms(k, len)?
            .into_iter()
            .map(|f| {
                let l = sym2_l1(&f, Sym2Method::NormIdentity, 1e-10)?;
                Ok(f.with_sym2_l1(l))
            })
            .collect();
        match attached {
            Err(Error::InsufficientTable { required, .. }) if required > len => len = required,
            other => return other,
        }
    }
}

pub fn variance_experiment(config: &VarianceConfig) -> Result<VarianceReport> {
    config.validate()?;
    let c = config;
    let b = main_term(c.h1, c.h2, &c.w1, &c.w2)?;
    let forms = if c.k <= c.k_eigen_max {
        let x_max = c.x_grid.iter().cloned().fold(0.0, f64::max);
        let a_max = c.w1.support().1.max(c.w2.support().1);
        let n = (a_max * x_max).ceil() as usize + c.h1.max(c.h2) as usize + 1;
        Some(eigenforms_with_l_values(c.k, n.max(2))?)
    } else {
        None
    };
    let root_k = (c.k as f64).sqrt() / 2.0;
    let evaluated = par_map(&c.x_grid, c.threads, |&x| -> Result<VariancePoint> {
        let p = variance_lhs_petersson(c.k, c.h1, c.h2, &c.w1, &c.w2, x, c.tail_tol)?;
        let lhs_eigen = match &forms {
            Some(fs) => Some(variance_lhs_eigen(c.k, c.h1, c.h2, &c.w1, &c.w2, x, fs)?),
            None => None,
        };
        let total = p.total();
        let guard = (c.h1 as f64) < 2.0 * c.w1.support().0 * x && (c.h2 as f64) < 2.0 * c.w2.support().0 * x;
        Ok(VariancePoint {
            x,
            lhs_eigen,
            lhs_petersson: total,
            diagonal: p.diagonal,
            offdiagonal: p.offdiagonal,
            tail_bound: p.tail_bound,
            c0_max: p.c0_max,
            main_term: b * x,
            residual: total - b * x,
            route_gap: lhs_eigen.map(|e| (e - total).abs()),
            extension_exact: guard,
            extra_allowance: if guard { 0.0 } else { c.h1.max(c.h2) as f64 },
            in_range: x <= root_k && c.w1.support().1 * c.w2.support().1 * x <= root_k,
        })
    });
    let points = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = points.iter().map(|p| p.residual).collect();
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let residual_slope = if xs.len() >= 2 { linear_fit(&xs, &residuals).slope } else { 0.0 };
    let routes_agree = forms.as_ref().map(|_| {
        points
            .iter()
            .all(|p| p.route_gap.unwrap_or(0.0) <= p.tail_bound + c.route_tol * (1.0 + p.lhs_petersson.abs()))
    });
    Ok(VarianceReport {
        k: c.k,
        h1: c.h1,
        h2: c.h2,
        w1: c.w1,
        w2: c.w2,
        main_term_constant: b,
        route_tol: c.route_tol,
        max_abs_residual: residuals.iter().map(|r| r.abs()).fold(0.0, f64::max),
        median_abs_residual: median(residuals.iter().map(|r| r.abs()).collect()),
        residual_slope,
        routes_agree,
        points,
    })
}
