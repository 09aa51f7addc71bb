use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use scslab_core::experiments::{
    diagonal_solutions, eigenforms_with_l_values, main_term, meansquare_experiment, meansquare_integral,
    variance_lhs_eigen, variance_lhs_petersson,
};
use scslab_core::numeric::integrate_adaptive;
use scslab_core::petersson::{trace_formula_rhs, Truncation};
use scslab_core::qarith::{delta_eigenform, delta_qexp, hecke_eigenforms, HeckeEigenform, QSeries};
use scslab_core::special::{bessel_j, divisor_count, divisors, gcd, kloosterman, primes_up_to};
use scslab_core::sums::{
    dirichlet_series, make_window, sharp_sum, smooth_range, smooth_sum, weighted_sum, ComplexPoint, Window,
    WindowKind,
};
use std::sync::OnceLock;

const TABLE: usize = 20_000;

fn delta_coeffs() -> &'static QSeries {
    static D: OnceLock<QSeries> = OnceLock::new();
    D.get_or_init(|| delta_qexp(2_000))
}

fn delta() -> &'static HeckeEigenform {
    static D: OnceLock<HeckeEigenform> = OnceLock::new();
    D.get_or_init(|| delta_eigenform(TABLE))
}

fn weight_24() -> &'static [HeckeEigenform] {
    static F: OnceLock<Vec<HeckeEigenform>> = OnceLock::new();
    F.get_or_init(|| hecke_eigenforms(24, 2_000).unwrap())
}

fn window(kind: WindowKind, a: f64, b: f64) -> Window {
    make_window(kind, a, b).unwrap()
}

fn hecke_residual(f: &HeckeEigenform, m: usize, n: usize) -> f64 {
    let g = gcd(m as u64, n as u64);
    let rhs: f64 = divisors(g).iter().map(|&d| f.lambda(m * n / (d * d) as usize)).sum();
    (f.lambda(m) * f.lambda(n) - rhs).abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tau_is_multiplicative((m, n) in (1usize..=1000).prop_flat_map(|m| (Just(m), 1..=2000 / m))) {
        prop_assume!(gcd(m as u64, n as u64) == 1);
        let d = delta_coeffs();
        prop_assert_eq!(d.coeff(m * n), &(d.coeff(m) * d.coeff(n)));
    }

    #[test]
    fn hecke_relations_hold(m in 1usize..=200, n in 1usize..=200, which in 0usize..3) {
        let f = if which == 2 { delta() } else { &weight_24()[which] };
        prop_assume!(m * n <= f.len());
        prop_assert!(hecke_residual(f, m, n) <= 1e-8);
    }

    #[test]
    fn kloosterman_symmetric_real_and_bounded(m in 0u64..=50, n in 0u64..=50, c in 1u64..=100) {
        let s = kloosterman(m, n, c);
        prop_assert!((s - kloosterman(n, m, c)).abs() <= 1e-10 * c as f64);
        prop_assert!(s.abs() <= c as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn bessel_three_term_recurrence(nu in 2u32..=50, x in 0.5f64..100.0) {
        let (a, b, c) = (bessel_j(nu - 1, x).unwrap(), bessel_j(nu, x).unwrap(), bessel_j(nu + 1, x).unwrap());
        let rhs = 2.0 * nu as f64 / x * b;
        let scale = a.abs().max(c.abs()).max(rhs.abs()).max(1e-300);
        prop_assert!((a + c - rhs).abs() <= 1e-8 * scale, "nu={} x={} lhs={} rhs={}", nu, x, a + c, rhs);
    }

    #[test]
    fn bessel_below_majorant(nu in 11u32..=200, x in 0.0f64..60.0) {
        let j = bessel_j(nu, x).unwrap().abs();
        let ln_major = nu as f64 * (std::f64::consts::E * x / (2.0 * (nu as f64 + 1.0))).ln();
        prop_assert!(x == 0.0 || j.ln() <= ln_major + 1e-12);
    }

    #[test]
    fn bessel_small_argument(nu in 2u32..=40, x in 0.0f64..=1.0) {
        let ln_lead = nu as f64 * (x / 2.0).ln() - (1..=nu).map(|i| (i as f64).ln()).sum::<f64>();
        let lead = ln_lead.exp();
        let err = (bessel_j(nu, x).unwrap() - lead).abs();
        prop_assert!(err <= lead * (x / 2.0).powi(2) * (1.0 + 1e-9) + 1e-300);
    }

    #[test]
    fn window_vanishes_off_support(a in 0.1f64..3.0, len in 0.05f64..3.0, y in -1.0f64..8.0, k in 0usize..2) {
        let kind = [WindowKind::SmoothBump, WindowKind::CosineSpline][k];
        let w = window(kind, a, a + len);
        if y <= a || y >= a + len {
            prop_assert_eq!(w.eval(y), 0.0);
            prop_assert_eq!(w.deriv(1, y), 0.0);
        } else {
            prop_assert!(w.eval(y) > 0.0 && w.eval(y) <= 1.0);
        }
    }

    #[test]
    fn window_derivatives_match_differences(a in 0.5f64..2.0, len in 0.5f64..2.0, s in 0.15f64..0.85, order in 0usize..4) {
        let w = window(WindowKind::SmoothBump, a, a + len);
        let y = a + s * len;
        let h = 1e-4 * len;
        let f = |t: f64| w.deriv(order, t);
        let fd = (f(y - 2.0 * h) - 8.0 * f(y - h) + 8.0 * f(y + h) - f(y + 2.0 * h)) / (12.0 * h);
        let exact = w.deriv(order + 1, y);
        let scale = (0..=order + 1).map(|j| w.deriv(j, y).abs()).fold(1.0, f64::max);
        prop_assert!((fd - exact).abs() <= 1e-5 * scale, "fd={} exact={}", fd, exact);
    }

    #[test]
    fn sums_split_additively(x1 in 10usize..5000, extra in 1usize..5000, h in 1usize..=20) {
        let f = delta();
        let x = x1 + extra;
        let direct: f64 = (x1 + 1..=x).map(|n| f.lambda(n) * f.lambda(n + h)).sum();
        let split = sharp_sum(f, x1 as f64, h).unwrap() + direct;
        let whole = sharp_sum(f, x as f64, h).unwrap();
        prop_assert!((whole - split).abs() <= 1e-12 * (1.0 + whole.abs()) + 1e-11);

        let wdirect: f64 = (x1.saturating_sub(h) + 1..=x - h)
            .filter(|&n| n >= 1)
            .map(|n| f.lambda(n) * f.lambda(n + h) * (n as f64 / (n + h) as f64).powf(5.5))
            .sum();
        let wsplit = weighted_sum(f, x1 as f64, h).unwrap() + wdirect;
        let wwhole = weighted_sum(f, x as f64, h).unwrap();
        prop_assert!((wwhole - wsplit).abs() <= 1e-12 * (1.0 + wwhole.abs()) + 1e-11);
    }

    #[test]
    fn smooth_sum_is_linear_in_height(x in 20.0f64..5000.0, h in 1usize..=10, c in -3.0f64..3.0) {
        let w = window(WindowKind::SmoothBump, 1.0, 2.0);
        let f = delta();
        let a = smooth_sum(f, x, h, &w).unwrap();
        let b = smooth_sum(f, x, h, &w.with_height(c)).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + b.abs()));
        let (lo, hi) = smooth_range(x, h, &w).unwrap();
        let (mid, upper) = ((lo + hi) / 2, hi);
        let part = |from: usize, to: usize| -> f64 {
            (from..=to).map(|n| w.eval((n as f64 + h as f64 / 2.0) / x) * f.lambda(n) * f.lambda(n + h)).sum()
        };
        let split = part(lo, mid) + part(mid + 1, upper);
        prop_assert!((a - split).abs() <= 1e-12 * (1.0 + a.abs()) + 1e-12);
    }

    #[test]
    fn dirichlet_conjugation(re in 1.6f64..4.0, im in -30.0f64..30.0, h in 1usize..=5) {
        let f = &weight_24()[0];
        let s = ComplexPoint::new(re, im);
        let a = dirichlet_series(f, s, h, 1000).unwrap();
        let b = dirichlet_series(f, s.conj(), h, 1000).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() <= 1e-14 * (1.0 + a.value.norm()));
    }

    #[test]
    fn diagonal_solutions_are_sound(d1 in 1u64..=60, d2 in 1u64..=60) {
        prop_assume!(d1 != d2);
        let sols = diagonal_solutions(d1, d2).unwrap();
        let gap = d1.abs_diff(d2) * (d1 + d2);
        prop_assert!(sols.len() as u64 <= divisor_count(gap).unwrap());
        for &(r1, r2) in &sols {
            prop_assert!(r1 >= 1 && r2 >= 1);
            prop_assert_eq!(r1 * (r1 + d1), r2 * (r2 + d2));
        }
    }
}

#[test]
fn deligne_bound_for_delta() {
    let f = delta();
    let primes = primes_up_to(TABLE);
    assert!(primes.iter().all(|&p| f.lambda(p).abs() <= 2.0 + 1e-8));
    for n in 1..=TABLE {
        assert!(f.lambda(n).abs() <= divisor_count(n as u64).unwrap() as f64 + 1e-8, "n={n}");
    }
}

#[test]
fn delta_table_matches_integer_coefficients() {
    let d = delta_coeffs();
    let f = delta();
    for n in 1..=2000usize {
        let exact = d.coeff(n).to_f64().unwrap() / (n as f64).powf(5.5);
        assert!((f.lambda(n) - exact).abs() <= 1e-12 * exact.abs().max(1e-3), "n={n}");
    }
    assert!(d.coeff(0).is_zero());
    assert_eq!(d.coeff(2), &BigInt::from(-24));
}

#[test]
fn weighted_sum_tracks_sharp_sum() {
    let f = delta();
    for x in [1e2, 1e3, 1e4] {
        for h in 1..=10usize {
            let b = weighted_sum(f, x, h).unwrap();
            let a = sharp_sum(f, x, h).unwrap();
            let bound = 5.0 * h as f64 * x.powf(0.1);
            assert!((b - a).abs() <= bound, "X={x} h={h}: |B-A| = {} > {bound}", (b - a).abs());
        }
    }
}

#[test]
fn diagonal_solutions_match_exhaustive_search() {
    for d1 in 1..=30u64 {
        for d2 in 1..=30u64 {
            if d1 == d2 {
                continue;
            }
            let mut brute = Vec::new();
            for r1 in 1..=1000u64 {
                let m = r1 * (r1 + d1);
                for r2 in 1..=1000u64 {
                    let v = r2 * (r2 + d2);
                    if v == m {
                        brute.push((r1, r2));
                    }
                    if v >= m {
                        break;
                    }
                }
            }
            let fast: Vec<_> = diagonal_solutions(d1, d2).unwrap().into_iter().filter(|&(r1, r2)| r1 <= 1000 && r2 <= 1000).collect();
            assert_eq!(fast, brute, "d1={d1} d2={d2}");
        }
    }
}

#[test]
fn variance_routes_agree() {
    let w = window(WindowKind::SmoothBump, 1.0, 2.0);
    for k in [12u32, 16, 18, 20, 22, 24, 26] {
        let forms = eigenforms_with_l_values(k, 40).unwrap();
        for x in [3.0, 4.0, 5.0] {
            for (h1, h2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let eig = variance_lhs_eigen(k, h1, h2, &w, &w, x, &forms).unwrap();
                let pet = variance_lhs_petersson(k, h1, h2, &w, &w, x, 1e-12).unwrap();
                let v = pet.total();
                assert!(
                    (eig - v).abs() <= pet.tail_bound + 1e-3 * (1.0 + v.abs()),
                    "k={k} X={x} h=({h1},{h2}): eigen {eig} petersson {v}"
                );
            }
        }
    }
}

#[test]
fn trace_formula_stable_beyond_auto_modulus() {
    for (k, n1, n2) in [(12u32, 1u64, 1u64), (16, 3, 7), (24, 10, 19), (26, 20, 20)] {
        let auto = trace_formula_rhs(k, n1, n2, Truncation::Tolerance(1e-12)).unwrap();
        let more = trace_formula_rhs(k, n1, n2, Truncation::Modulus(auto.c0 * 4 + 10)).unwrap();
        assert!((auto.total() - more.total()).abs() <= 1e-10 * (1.0 + auto.total().abs()), "k={k}");
    }
}

/// Σ_r g((r + d/2)/(dX)) against dX∫g with g(y) = W1(hy)W2(hy).
#[test]
fn single_divisor_diagonal_matches_integral() {
    let pairs = [
        (window(WindowKind::SmoothBump, 1.0, 2.0), window(WindowKind::SmoothBump, 1.0, 2.0)),
        (window(WindowKind::SmoothBump, 0.5, 2.0), window(WindowKind::CosineSpline, 1.0, 3.0)),
    ];
    for (w1, w2) in &pairs {
        for h in [1u64, 2, 3, 6] {
            let hf = h as f64;
            let g = |j: usize, y: f64| -> f64 {
                let (a0, a1, a2) = (w1.eval(hf * y), w1.deriv(1, hf * y), w1.deriv(2, hf * y));
                let (b0, b1, b2) = (w2.eval(hf * y), w2.deriv(1, hf * y), w2.deriv(2, hf * y));
                match j {
                    0 => a0 * b0,
                    1 => hf * (a1 * b0 + a0 * b1),
                    _ => hf * hf * (a2 * b0 + 2.0 * a1 * b1 + a0 * b2),
                }
            };
            let lo = w1.support().0.max(w2.support().0) / hf;
            let hi = w1.support().1.min(w2.support().1) / hf;
            let norm: f64 = (0..=2).map(|j| integrate_adaptive(|y| g(j, y).abs(), lo, hi, 1e-12).0).sum();
            let per_unit = main_term(h, h, w1, w2).unwrap() / divisors(h).iter().sum::<u64>() as f64;
            for x in [10.0, 17.5, 40.0] {
                if hf >= 2.0 * w1.support().0.min(w2.support().0) * x {
                    continue;
                }
                for d in divisors(h) {
                    let df = d as f64;
                    let sum: f64 = (1..).map(|r: u64| (r as f64 + df / 2.0) / (df * x)).take_while(|&y| y < hi).map(|y| g(0, y)).sum();
                    let err = (sum - df * x * per_unit).abs();
                    assert!(err <= 10.0 * norm / x, "h={h} d={d} X={x}: err {err} vs {}", 10.0 * norm / x);
                }
            }
        }
    }
}

#[test]
fn meansquare_two_methods_agree() {
    let f = delta();
    for h in [1u64, 3] {
        for x in [256u64, 1024, 4096] {
            let direct: f64 = (x..2 * x).map(|n| sharp_sum(f, n as f64, h as usize).unwrap().powi(2)).sum();
            let running = meansquare_integral(f, h, x).unwrap();
            assert!((running - direct).abs() <= 1e-9 * direct, "h={h} X={x}: {running} vs {direct}");
        }
    }
}

#[test]
fn meansquare_normalized_band_for_delta() {
    let xs: Vec<u64> = (8..=13).map(|e| 1u64 << e).collect();
    let report = meansquare_experiment(delta(), &[1, 2, 3, 4], &xs).unwrap();
    let normalized: Vec<f64> = report.points.iter().filter(|p| p.in_range).map(|p| p.normalized).collect();
    let (lo, hi) = normalized.iter().fold((f64::MAX, 0.0f64), |(l, u), &v| (l.min(v), u.max(v)));
    assert!(hi / lo <= 10.0, "band factor {}", hi / lo);
}
