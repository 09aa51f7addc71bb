use super::Window;
use crate::error::{domain, Result};
use crate::numeric::KahanSum;
use crate::qarith::HeckeEigenform;

fn floor_index(x: f64) -> usize {
    if x < 1.0 {
        0
    } else {
        x.floor() as usize
    }
}

/// A_f(X, h) = Σ_{1≤n≤X} λ(n)λ(n+h).
pub fn sharp_sum(f: &HeckeEigenform, x: f64, h: usize) -> Result<f64> {
    if h == 0 {
        return domain("shift h must be positive");
    }
    let top = floor_index(x);
    if top == 0 {
        return Ok(0.0);
    }
    f.require(top + h)?;
    let lam = f.table();
    Ok((1..=top).map(|n| lam[n - 1] * lam[n + h - 1]).collect::<KahanSum>().value())
}

/// B_f(X, h) = Σ_{n+h≤X} λ(n+h)λ(n)(n/(n+h))^{(k−1)/2}.
pub fn weighted_sum(f: &HeckeEigenform, x: f64, h: usize) -> Result<f64> {
    if h == 0 {
        return domain("shift h must be positive");
    }
    let top = floor_index(x);
    if top <= h {
        return Ok(0.0);
    }
    f.require(top)?;
    let lam = f.table();
    let e = (f.weight() as f64 - 1.0) / 2.0;
    Ok((1..=top - h)
        .map(|n| {
            let m = n + h;
            lam[m - 1] * lam[n - 1] * (e * (n as f64 / m as f64).ln()).exp()
        })
        .collect::<KahanSum>()
        .value())
}

/// Range of n with a_W·X ≤ n + h/2 ≤ A_W·X, n ≥ 1 (possibly empty).
pub fn smooth_range(x: f64, h: usize, w: &Window) -> Option<(usize, usize)> {
    let (a, b) = w.support();
    let half = h as f64 / 2.0;
    let hi = (b * x - half).floor();
    if hi < 1.0 {
        return None;
    }
    let lo = (a * x - half).ceil().max(1.0);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

/// Σ_n λ(n)λ(n+h) W((n + h/2)/X), summed over the support of W.
pub fn smooth_sum(f: &HeckeEigenform, x: f64, h: usize, w: &Window) -> Result<f64> {
    if h == 0 {
        return domain("shift h must be positive");
    }
    if !(x > 0.0) {
        return domain(format!("X must be positive, got {x}"));
    }
    let Some((lo, hi)) = smooth_range(x, h, w) else { return Ok(0.0) };
    f.require(hi + h)?;
    let lam = f.table();
    let half = h as f64 / 2.0;
    Ok((lo..=hi)
        .map(|n| lam[n - 1] * lam[n + h - 1] * w.eval((n as f64 + half) / x))
        .collect::<KahanSum>()
        .value())
}

/// Σ_{n≤X} λ(n)².
pub fn rankin_statistic(f: &HeckeEigenform, x: f64) -> Result<f64> {
    let top = floor_index(x);
    f.require(top)?;
    Ok(f.table()[..top].iter().map(|l| l * l).collect::<KahanSum>().value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::delta_eigenform;
    use crate::sums::{make_window, WindowKind};

    fn tau_lambda(n: u64, tau: i64) -> f64 {
        tau as f64 / (n as f64).powf(5.5)
    }

    #[test]
    fn sharp_sum_small_cases() {
        let d = delta_eigenform(40);
        assert_eq!(sharp_sum(&d, 0.5, 1).unwrap(), 0.0);
        let l2 = tau_lambda(2, -24);
        let l3 = tau_lambda(3, 252);
        assert!((sharp_sum(&d, 1.0, 1).unwrap() - l2).abs() < 1e-15);
        assert!((sharp_sum(&d, 2.9, 1).unwrap() - (l2 + l2 * l3)).abs() < 1e-15);
        match sharp_sum(&d, 39.0, 5) {
            Err(crate::Error::InsufficientTable { required, .. }) => assert_eq!(required, 44),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weighted_sum_small_cases() {
        let d = delta_eigenform(40);
        assert_eq!(weighted_sum(&d, 1.0, 1).unwrap(), 0.0);
        let l2 = tau_lambda(2, -24);
        let l3 = tau_lambda(3, 252);
        let want = l2 * 0.5f64.powf(5.5) + l3 * l2 * (2.0f64 / 3.0).powf(5.5);
        assert!((weighted_sum(&d, 3.0, 1).unwrap() - want).abs() < 1e-15);
        // n = h term carries 2^{-(k-1)/2}
        let l4 = tau_lambda(4, -1472);
        let only = weighted_sum(&d, 4.0, 2).unwrap() - weighted_sum(&d, 3.0, 2).unwrap();
        assert!((only - l4 * l2 * 2f64.powf(-5.5)).abs() < 1e-15);
    }

    #[test]
    fn smooth_sum_support_and_brute_force() {
        let d = delta_eigenform(200);
        let w = make_window(WindowKind::SmoothBump, 1.0, 2.0).unwrap();
        assert_eq!(smooth_range(10.0, 1, &w), Some((10, 19)));
        let brute: f64 = (1..=150).map(|n| d.lambda(n) * d.lambda(n + 1) * w.eval((n as f64 + 0.5) / 10.0)).sum();
        assert!((smooth_sum(&d, 10.0, 1, &w).unwrap() - brute).abs() < 1e-14);
        // endpoint n with W exactly zero: n + 1 = 10 → y = 1
        assert_eq!(smooth_range(10.0, 2, &w), Some((9, 19)));
        assert_eq!(w.eval(1.0), 0.0);
    }

    #[test]
    fn sharp_window_on_unit_interval_matches_sharp_sum() {
        let d = delta_eigenform(500);
        let w = make_window(WindowKind::SharpCutoff, 0.0, 1.0).unwrap();
        for h in 1..6 {
            for x in [3.0, 10.0, 57.5, 200.0] {
                let hf = h as f64;
                assert_eq!(smooth_sum(&d, x, h, &w).unwrap(), sharp_sum(&d, x - hf / 2.0, h).unwrap());
            }
        }
    }

    #[test]
    fn rankin_statistic_basics() {
        let d = delta_eigenform(10_000);
        assert_eq!(rankin_statistic(&d, 1.0).unwrap(), 1.0);
        let mut prev = 0.0;
        for x in (10..=10_000).step_by(10) {
            let v = rankin_statistic(&d, x as f64).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(rankin_statistic(&d, 10_001.0).is_err());
    }
}
