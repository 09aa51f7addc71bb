use crate::error::{domain, Result};
use crate::numeric::{linear_fit, KahanSum};
use crate::qarith::HeckeEigenform;
use crate::sums::{smooth_sum, Window};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSquarePoint {
    pub h: u64,
    pub x: u64,
    /// V(X, h) = (X⁻¹ ∫_X^{2X} A_f(x, h)² dx)^{1/2}.
    pub v: f64,
    /// V / (h^{1/2} X^{1/2}).
    pub normalized: f64,
    /// h ≤ X^{1/2}.
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub h: u64,
    pub exponent: f64,
    pub stderr: f64,
    /// exponent ± 2·stderr.
    pub band: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSquareReport {
    pub k: u32,
    pub hs: Vec<u64>,
    pub xs: Vec<u64>,
    pub points: Vec<MeanSquarePoint>,
    pub fits: Vec<ExponentFit>,
    /// max/min of the normalized column over in-range points.
    pub normalized_spread: f64,
}

/// Σ_{n=X}^{2X−1} A_f(n, h)², the exact integral of A_f(·, h)² over [X, 2X).
pub fn meansquare_integral(f: &HeckeEigenform, h: u64, x: u64) -> Result<f64> {
    if h == 0 || x == 0 {
        return domain("h and X must be positive");
    }
    let h = h as usize;
    let x = x as usize;
    f.require(2 * x - 1 + h)?;
    let lam = f.table();
    let mut a = KahanSum::new();
    for n in 1..x {
        a.add(lam[n - 1] * lam[n + h - 1]);
    }
    let mut sq = KahanSum::new();
    for n in x..2 * x {
        a.add(lam[n - 1] * lam[n + h - 1]);
        let v = a.value();
        sq.add(v * v);
    }
    Ok(sq.value())
}

pub fn meansquare_experiment(f: &HeckeEigenform, hs: &[u64], xs: &[u64]) -> Result<MeanSquareReport> {
    if hs.is_empty() || xs.is_empty() {
        return domain("h-list and X-grid must be non-empty");
    }
    let mut points = Vec::new();
    let mut fits = Vec::new();
    for &h in hs {
        let mut lx = Vec::new();
        let mut lv = Vec::new();
        for &x in xs {
            let v = (meansquare_integral(f, h, x)? / x as f64).sqrt();
            let normalized = v / ((h as f64).sqrt() * (x as f64).sqrt());
            points.push(MeanSquarePoint { h, x, v, normalized, in_range: (h * h) <= x });
            if v > 0.0 {
                lx.push((x as f64).ln());
                lv.push(v.ln());
            }
        }
        if lx.len() >= 2 {
            let fit = linear_fit(&lx, &lv);
            fits.push(ExponentFit {
                h,
                exponent: fit.slope,
                stderr: fit.slope_stderr,
                band: (fit.slope - 2.0 * fit.slope_stderr, fit.slope + 2.0 * fit.slope_stderr),
            });
        }
    }
    let norm: Vec<f64> = points.iter().filter(|p| p.in_range && p.v > 0.0).map(|p| p.normalized).collect();
    let normalized_spread = if norm.is_empty() {
        1.0
    } else {
        norm.iter().cloned().fold(0.0, f64::max) / norm.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(MeanSquareReport { k: f.weight(), hs: hs.to_vec(), xs: xs.to_vec(), points, fits, normalized_spread })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub h: u64,
    pub x: f64,
    /// A_f^W(X, h).
    pub value: f64,
    /// |A_f^W(X, h)| / X^{0.55}.
    pub ratio: f64,
    /// h ≤ X^{0.45}.
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecadeAggregate {
    pub h: u64,
    /// Grid points with 10^decade ≤ X < 10^{decade+1}.
    pub decade: i32,
    /// Root mean square of the ratio column.
    pub rms_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothScanReport {
    pub k: u32,
    pub window: Window,
    pub points: Vec<ScanPoint>,
    pub decades: Vec<DecadeAggregate>,
    /// Some consecutive pair of decade aggregates grows by more than 2×.
    pub doubling_trend: bool,
}

pub const SCAN_EXPONENT: f64 = 0.55;

pub fn smooth_bound_scan(f: &HeckeEigenform, w: &Window, hs: &[u64], xs: &[f64]) -> Result<SmoothScanReport> {
    let mut points = Vec::new();
    let mut decades = Vec::new();
    let mut doubling_trend = false;
    for &h in hs {
        let mut groups: std::collections::BTreeMap<i32, Vec<f64>> = Default::default();
        for &x in xs {
            let value = smooth_sum(f, x, h as usize, w)?;
            let ratio = value.abs() / x.powf(SCAN_EXPONENT);
            points.push(ScanPoint { h, x, value, ratio, in_range: (h as f64) <= x.powf(0.45) });
            groups.entry(x.log10().floor() as i32).or_default().push(ratio);
        }
        let aggs: Vec<DecadeAggregate> = groups
            .into_iter()
            .map(|(decade, r)| DecadeAggregate {
                h,
                decade,
                rms_ratio: (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt(),
            })
            .collect();
        for pair in aggs.windows(2) {
            if pair[1].rms_ratio > 2.0 * pair[0].rms_ratio {
                doubling_trend = true;
            }
        }
        decades.extend(aggs);
    }
    Ok(SmoothScanReport { k: f.weight(), window: *w, points, decades, doubling_trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::delta_eigenform;
    use crate::sums::{make_window, sharp_sum, WindowKind};

    #[test]
    fn integral_matches_direct_quadrature() {
        let d = delta_eigenform(300);
        for h in [1, 3] {
            for x in [5u64, 17, 64] {
                let s = meansquare_integral(&d, h, x).unwrap();
                // midpoint rule on each unit interval is exact for a step function
                let mut direct = 0.0;
                for j in 0..(4 * x) {
                    let t = x as f64 + (j as f64 + 0.5) / 4.0;
                    direct += sharp_sum(&d, t, h as usize).unwrap().powi(2) / 4.0;
                }
                assert!((s - direct).abs() < 1e-12 * (1.0 + direct));
            }
        }
    }

    #[test]
    fn zero_table_gives_zero() {
        let z = HeckeEigenform::from_raw_table(12, vec![0.0; 100]);
        let r = meansquare_experiment(&z, &[1, 2], &[8, 16, 32]).unwrap();
        assert!(r.points.iter().all(|p| p.v == 0.0));
        let w = make_window(WindowKind::SmoothBump, 1.0, 2.0).unwrap();
        let s = smooth_bound_scan(&z, &w, &[1], &[10.0, 20.0, 40.0]).unwrap();
        assert!(s.points.iter().all(|p| p.value == 0.0));
        assert!(!s.doubling_trend);
    }

    #[test]
    fn scan_is_linear_in_window() {
        let d = delta_eigenform(500);
        let w = make_window(WindowKind::SmoothBump, 1.0, 2.0).unwrap();
        let a = smooth_bound_scan(&d, &w, &[1, 2], &[50.0, 100.0, 200.0]).unwrap();
        let b = smooth_bound_scan(&d, &w.with_height(2.0), &[1, 2], &[50.0, 100.0, 200.0]).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(q.ratio, 2.0 * p.ratio);
        }
    }

    #[test]
    fn out_of_range_entries_are_flagged() {
        let d = delta_eigenform(200);
        let r = meansquare_experiment(&d, &[1, 4], &[8, 16, 32]).unwrap();
        let p = r.points.iter().find(|p| p.h == 4 && p.x == 8).unwrap();
        assert!(!p.in_range && p.v > 0.0);
        assert_eq!(r.fits.len(), 2);
    }
}
