use crate::error::{domain, Error, Result};
use crate::numeric::{integrate_adaptive, KahanSum};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

/// Window families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// exp(1 − 1/(1 − t²)) on the rescaled support, C^∞.
    SmoothBump,
    /// (1 + cos πt)/2 on the rescaled support, C¹ with piecewise second derivative.
    CosineSpline,
    /// Indicator of the closed support.
    SharpCutoff,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::SmoothBump => "smooth-bump",
            WindowKind::CosineSpline => "cosine-spline",
            WindowKind::SharpCutoff => "sharp-cutoff",
        }
    }

    /// Highest derivative order available.
    pub fn max_order(self) -> usize {
        match self {
            WindowKind::SmoothBump => BUMP_ORDERS,
            WindowKind::CosineSpline => 2,
            WindowKind::SharpCutoff => 0,
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth-bump" | "bump" => Ok(WindowKind::SmoothBump),
            "cosine-spline" | "cosine" => Ok(WindowKind::CosineSpline),
            "sharp-cutoff" | "sharp" => Ok(WindowKind::SharpCutoff),
            other => Err(Error::Config(format!("unknown window kind '{other}'"))),
        }
    }
}

/// Sobolev exponent p ∈ {1, 2, ∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormP {
    One,
    Two,
    Infinity,
}

const BUMP_ORDERS: usize = 8;

/// P_i with φ^{(i)}(t) = P_i(t)/(1 − t²)^{2i} · φ(t), φ(t) = exp(1 − 1/(1 − t²)).
fn bump_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        // P_{i+1} = u²P_i' + 4i·t·u·P_i − 2t·P_i, u = 1 − t²
        let u = [1.0, 0.0, -1.0];
        let u2 = [1.0, 0.0, -2.0, 0.0, 1.0];
        let mut out = vec![vec![1.0]];
        for i in 0..BUMP_ORDERS {
            let p = &out[i];
            let dp: Vec<f64> = (1..p.len()).map(|j| j as f64 * p[j]).collect();
            let mut next = vec![0.0; p.len() + 4];
            for (a, &x) in u2.iter().enumerate() {
                for (b, &y) in dp.iter().enumerate() {
                    next[a + b] += x * y;
                }
            }
            for (a, &x) in u.iter().enumerate() {
                for (b, &y) in p.iter().enumerate() {
                    next[a + b + 1] += 4.0 * i as f64 * x * y;
                }
            }
            for (b, &y) in p.iter().enumerate() {
                next[b + 1] -= 2.0 * y;
            }
            while next.len() > 1 && *next.last().unwrap() == 0.0 {
                next.pop();
            }
            out.push(next);
        }
        out
    })
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// A compactly supported weight function W on [a_W, A_W].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub a: f64,
    pub b: f64,
    pub height: f64,
}

/// Builds a unit-height window of the given family on [a_W, A_W].
///
/// Smooth families need 0 < a_W < A_W. The sharp cutoff also accepts
/// a_W = 0 and a degenerate interval.
pub fn make_window(kind: WindowKind, a_w: f64, big_a_w: f64) -> Result<Window> {
    if !(a_w.is_finite() && big_a_w.is_finite()) {
        return domain("window support must be finite");
    }
    match kind {
        WindowKind::SharpCutoff => {
            if a_w < 0.0 || big_a_w < a_w {
                return domain(format!("sharp cutoff needs 0 <= a_W <= A_W, got [{a_w}, {big_a_w}]"));
            }
        }
        _ => {
            if a_w <= 0.0 || big_a_w <= a_w {
                return domain(format!("{kind} needs 0 < a_W < A_W, got [{a_w}, {big_a_w}]"));
            }
        }
    }
    Ok(Window { kind, a: a_w, b: big_a_w, height: 1.0 })
}

impl Window {
    pub fn with_height(mut self, height: f64) -> Self {
        self.height = height;
        self
    }

    /// (a_W, A_W).
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn max_order(&self) -> usize {
        self.kind.max_order()
    }

    pub fn is_smooth(&self) -> bool {
        self.kind != WindowKind::SharpCutoff
    }

    fn local(&self, y: f64) -> Option<f64> {
        let t = (2.0 * y - self.a - self.b) / (self.b - self.a);
        (t.abs() < 1.0).then_some(t)
    }

    pub fn eval(&self, y: f64) -> f64 {
        if self.kind == WindowKind::SharpCutoff {
            return if y >= self.a && y <= self.b { self.height } else { 0.0 };
        }
        self.deriv(0, y)
    }

    /// i-th derivative in y; zero outside the open support.
    ///
    /// # Panics
    /// If `order` exceeds [`Window::max_order`].
    pub fn deriv(&self, order: usize, y: f64) -> f64 {
        assert!(order <= self.max_order(), "derivative order {order} not available for {}", self.kind);
        if self.kind == WindowKind::SharpCutoff {
            return self.eval(y);
        }
        let Some(t) = self.local(y) else { return 0.0 };
        let s = 2.0 / (self.b - self.a);
        let scale = self.height * s.powi(order as i32);
        match self.kind {
            WindowKind::SmoothBump => {
                let u = 1.0 - t * t;
                let p = horner(&bump_polys()[order], t);
                scale * p * (1.0 - 1.0 / u - 2.0 * order as f64 * u.ln()).exp()
            }
            WindowKind::CosineSpline => {
                let pt = std::f64::consts::PI * t;
                let pi = std::f64::consts::PI;
                scale
                    * match order {
                        0 => 0.5 * (1.0 + pt.cos()),
                        1 => -0.5 * pi * pt.sin(),
                        _ => -0.5 * pi * pi * pt.cos(),
                    }
            }
            WindowKind::SharpCutoff => unreachable!(),
        }
    }

    /// ∫ W(c₁y)W(c₂y) dy, adaptive quadrature over the common support.
    pub fn product_integral(&self, c1: f64, other: &Window, c2: f64) -> f64 {
        let lo = (self.a / c1).max(other.a / c2);
        let hi = (self.b / c1).min(other.b / c2);
        if hi <= lo {
            return 0.0;
        }
        if self.kind == WindowKind::SharpCutoff && other.kind == WindowKind::SharpCutoff {
            return self.height * other.height * (hi - lo);
        }
        integrate_adaptive(|y| self.eval(c1 * y) * other.eval(c2 * y), lo, hi, 1e-13).0
    }

    fn sup_abs(&self, order: usize) -> f64 {
        let samples = 4000;
        let w = self.b - self.a;
        let f = |y: f64| self.deriv(order, y).abs();
        let mut best = (0.0, self.a);
        for j in 1..samples {
            let y = self.a + w * j as f64 / samples as f64;
            let v = f(y);
            if v > best.0 {
                best = (v, y);
            }
        }
        // golden-section polish around the best sample
        let (mut lo, mut hi) = (best.1 - w / samples as f64, best.1 + w / samples as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if f(m1) > f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best.0.max(f(0.5 * (lo + hi)))
    }

    fn lp_norm_pow(&self, order: usize, p: NormP) -> f64 {
        let pw = match p {
            NormP::One => 1,
            NormP::Two => 2,
            NormP::Infinity => unreachable!(),
        };
        let scale = self.deriv_scale(order).max(f64::MIN_POSITIVE);
        let tol = 1e-11 * scale.powi(pw) * (self.b - self.a);
        // split at the interior points where the integrand may have kinks
        let pieces = 16;
        let w = self.b - self.a;
        let mut acc = KahanSum::new();
        for j in 0..pieces {
            let lo = self.a + w * j as f64 / pieces as f64;
            let hi = self.a + w * (j + 1) as f64 / pieces as f64;
            acc.add(integrate_adaptive(|y| self.deriv(order, y).abs().powi(pw), lo, hi, tol / pieces as f64).0);
        }
        acc.value()
    }

    fn deriv_scale(&self, order: usize) -> f64 {
        (self.height * (2.0 / (self.b - self.a)).powi(order as i32)).abs()
    }
}

/// ‖W‖_{l,p}: (Σ_{i≤l} ‖W^{(i)}‖_p^p)^{1/p} for finite p, Σ_{i≤l} ‖W^{(i)}‖_∞ for p = ∞.
pub fn sobolev_norm(w: &Window, l: usize, p: NormP) -> Result<f64> {
    if w.kind == WindowKind::SharpCutoff {
        if l > 0 || p != NormP::Infinity {
            return domain("sharp-cutoff windows admit only the l = 0, p = ∞ norm");
        }
        return Ok(w.height.abs());
    }
    if l > w.max_order() {
        return domain(format!("{} provides derivatives up to order {}, requested {l}", w.kind, w.max_order()));
    }
    if w.height == 0.0 {
        return Ok(0.0);
    }
    match p {
        NormP::Infinity => {
            let mut acc = KahanSum::new();
            for i in 0..=l {
                acc.add(if i == 0 && w.kind == WindowKind::SmoothBump {
                    w.height.abs()
                } else {
                    w.sup_abs(i)
                });
            }
            Ok(acc.value())
        }
        NormP::One => Ok((0..=l).map(|i| w.lp_norm_pow(i, p)).collect::<KahanSum>().value()),
        NormP::Two => Ok((0..=l).map(|i| w.lp_norm_pow(i, p)).collect::<KahanSum>().value().sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_polynomials_low_orders() {
        let p = bump_polys();
        assert_eq!(p[1], vec![0.0, -2.0]);
        // P_2 = 6t⁴ − 2
        assert_eq!(p[2], vec![-2.0, 0.0, 0.0, 0.0, 6.0]);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for kind in [WindowKind::SmoothBump, WindowKind::CosineSpline] {
            let w = make_window(kind, 1.0, 2.0).unwrap().with_height(1.7);
            for i in 1..=w.max_order() {
                for j in 1..20 {
                    let y = 1.1 + 0.8 * j as f64 / 20.0;
                    let h = 1e-4;
                    let g = |z: f64| w.deriv(i - 1, z);
                    let fd = (8.0 * (g(y + h) - g(y - h)) - (g(y + 2.0 * h) - g(y - 2.0 * h))) / (12.0 * h);
                    let exact = w.deriv(i, y);
                    let scale = (0..=i).map(|m| w.deriv(m, y).abs()).fold(0.0, f64::max);
                    assert!(
                        (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3 * scale),
                        "{kind} order {i} at {y}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn vanishes_outside_support() {
        for kind in [WindowKind::SmoothBump, WindowKind::CosineSpline, WindowKind::SharpCutoff] {
            let w = make_window(kind, 1.0, 2.0).unwrap();
            for y in [-1.0, 0.0, 0.999, 2.001, 5.0] {
                assert_eq!(w.eval(y), 0.0);
            }
        }
        let w = make_window(WindowKind::SharpCutoff, 1.0, 2.0).unwrap();
        assert_eq!(w.eval(1.0), 1.0);
        assert_eq!(w.eval(2.0), 1.0);
    }

    #[test]
    fn bump_sup_and_l1() {
        let w = make_window(WindowKind::SmoothBump, 1.0, 2.0).unwrap();
        assert_eq!(sobolev_norm(&w, 0, NormP::Infinity).unwrap(), 1.0);
        // ½∫_{-1}^{1} exp(1 − 1/(1 − t²)) dt, mpmath.quad at 30 digits
        let l1 = sobolev_norm(&w, 0, NormP::One).unwrap();
        assert!((l1 - 0.603450161218938087668118998165).abs() < 1e-10, "{l1}");
        let oracle = integrate_adaptive(|y| w.eval(y), 1.0, 2.0, 1e-13).0;
        assert!((l1 - oracle).abs() < 1e-10);
    }

    #[test]
    fn zero_window_norms() {
        for kind in [WindowKind::SmoothBump, WindowKind::CosineSpline] {
            let w = make_window(kind, 1.0, 2.0).unwrap().with_height(0.0);
            for p in [NormP::One, NormP::Two, NormP::Infinity] {
                assert_eq!(sobolev_norm(&w, 2, p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn cosine_norms_closed_form() {
        let w = make_window(WindowKind::CosineSpline, 1.0, 3.0).unwrap();
        // on [1,3], t = y − 2: ‖W‖₁ = 1, ‖W'‖∞ = π/2, ‖W''‖∞ = π²/2
        let pi = std::f64::consts::PI;
        assert!((sobolev_norm(&w, 0, NormP::One).unwrap() - 1.0).abs() < 1e-9);
        let s = sobolev_norm(&w, 2, NormP::Infinity).unwrap();
        assert!((s - (1.0 + pi / 2.0 + pi * pi / 2.0)).abs() < 1e-8, "{s}");
        // ‖W‖₂² = 3/4, ‖W'‖₂² = π²/4, ‖W''‖₂² = π⁴/4
        let s2 = sobolev_norm(&w, 2, NormP::Two).unwrap();
        assert!((s2 - (0.75 + pi * pi / 4.0 + pi.powi(4) / 4.0).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn sharp_cutoff_restrictions() {
        let w = make_window(WindowKind::SharpCutoff, 0.0, 1.0).unwrap().with_height(2.5);
        assert!(!w.is_smooth());
        assert_eq!(sobolev_norm(&w, 0, NormP::Infinity).unwrap(), 2.5);
        assert!(sobolev_norm(&w, 1, NormP::Infinity).is_err());
        assert!(sobolev_norm(&w, 0, NormP::One).is_err());
        assert!(make_window(WindowKind::SmoothBump, 0.0, 1.0).is_err());
        assert!(make_window(WindowKind::SmoothBump, 2.0, 1.0).is_err());
    }

    #[test]
    fn kind_names_roundtrip() {
        for kind in [WindowKind::SmoothBump, WindowKind::CosineSpline, WindowKind::SharpCutoff] {
            assert_eq!(kind.name().parse::<WindowKind>().unwrap(), kind);
        }
    }
}
