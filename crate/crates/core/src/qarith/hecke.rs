//! Hecke operators on the Victor Miller basis and extraction of normalized
//! eigenforms.

use super::eigenform::HeckeEigenform;
use super::forms::{dim_cusp_forms, victor_miller_basis};
use super::series::QSeries;
use crate::error::{Error, Result};
use crate::numeric::{bigint_to_scaled_f64, FixedPoint};
use crate::special::{divisors, gcd};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Square matrix with exact integer entries.
pub type IntMatrix = Vec<Vec<BigInt>>;

/// Matrix of T_m in an echelonized basis: row i holds the coordinates of
/// T_m f_i, i.e. M[i][j] = Σ_{e | (m, j)} e^{k−1} a_{f_i}(mj/e²).
///
/// The basis is integral with identity leading block, so the entries are
/// integers.
pub fn hecke_matrix(k: u32, m: u64, basis: &[QSeries], n: usize) -> Result<IntMatrix> {
    let d = basis.len();
    let required = m as usize * d;
    let available = basis.iter().map(QSeries::order).min().unwrap_or(n).min(n);
    if required > available {
        return Err(Error::InsufficientTruncation { required, available });
    }
    let mut mat = vec![vec![BigInt::zero(); d]; d];
    for (i, f) in basis.iter().enumerate() {
        for j in 1..=d as u64 {
            let mut acc = BigInt::zero();
            for e in divisors(gcd(m, j)) {
                let idx = (m * j / (e * e)) as usize;
                acc += BigInt::from(e).pow(k - 1) * f.coeff(idx);
            }
            mat[i][j as usize - 1] = acc;
        }
    }
    Ok(mat)
}

fn transpose(a: &IntMatrix) -> IntMatrix {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].clone()).collect()).collect()
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(BigInt::zero(), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial det(xI − A) by Faddeev–LeVerrier, exact over ℤ.
/// Returns coefficients c_0, …, c_d (c_d = 1).
pub fn charpoly(a: &IntMatrix) -> Vec<BigInt> {
    let d = a.len();
    let mut c = vec![BigInt::zero(); d + 1];
    c[d] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for i in 1..=d {
        // M_i = A M_{i−1} + c_{d−i+1} I
        let mut next = mat_mul(a, &m);
        for (t, row) in next.iter_mut().enumerate() {
            row[t] += &c[d - i + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr = (0..d).fold(BigInt::zero(), |acc, t| acc + &am[t][t]);
        c[d - i] = -tr / BigInt::from(i);
    }
    c
}

/// Real roots of a polynomial with real roots via Aberth–Ehrlich iteration.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    use num_complex::Complex64 as C;
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<C> = (0..d)
        .map(|i| C::from_polar(radius, 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / d as f64))
        .collect();
    let eval = |x: C| -> (C, C) {
        let mut p = C::new(c[d], 0.0);
        let mut dp = C::new(0.0, 0.0);
        for i in (0..d).rev() {
            dp = dp * x + p;
            p = p * x + c[i];
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: C = (0..d).filter(|&j| j != i).map(|j| C::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (C::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    let mut r: Vec<f64> = z.iter().map(|x| x.re).collect();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

/// Polynomial value and derivative at a fixed-point argument.
fn eval_fixed(fp: &FixedPoint, c: &[BigInt], x: &BigInt) -> (BigInt, BigInt) {
    let d = c.len() - 1;
    let mut p = fp.from_int(&c[d]);
    let mut dp = BigInt::zero();
    for i in (0..d).rev() {
        dp = fp.mul(&dp, x) + &p;
        p = fp.mul(&p, x) + fp.from_int(&c[i]);
    }
    (p, dp)
}

fn newton_refine(fp: &FixedPoint, c: &[BigInt], guess: f64) -> BigInt {
    let mut x = fp.from_f64(guess);
    for _ in 0..200 {
        let (p, dp) = eval_fixed(fp, c, &x);
        if dp.is_zero() {
            break;
        }
        let step = fp.div(&p, &dp);
        x -= &step;
        if step.abs() <= BigInt::from(16) {
            break;
        }
    }
    x
}

/// Kernel vector of (A − αI) with first component 1, by fixed-point Gaussian
/// elimination with partial pivoting.
fn eigenvector(fp: &FixedPoint, a: &IntMatrix, alpha: &BigInt) -> Vec<BigInt> {
    let d = a.len();
    if d == 1 {
        return vec![fp.from_int(&BigInt::one())];
    }
    // unknowns v_2..v_d; equations: Σ_j (A − αI)_{ij} v_j = 0 with v_1 = 1
    let mut rows: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            let mut r: Vec<BigInt> = (1..d)
                .map(|j| {
                    let mut e = fp.from_int(&a[i][j]);
                    if i == j {
                        e -= alpha;
                    }
                    e
                })
                .collect();
            let mut rhs = fp.from_int(&a[i][0]);
            if i == 0 {
                rhs -= alpha;
            }
            r.push(-rhs);
            r
        })
        .collect();
    let unknowns = d - 1;
    for col in 0..unknowns {
        let piv = (col..d).max_by_key(|&r| rows[r][col].abs()).unwrap();
        rows.swap(col, piv);
        for r in (col + 1)..d {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = fp.div(&rows[r][col], &rows[col][col]);
            for t in col..=unknowns {
                let sub = fp.mul(&f, &rows[col][t]);
                rows[r][t] -= sub;
            }
        }
    }
    let mut v = vec![BigInt::zero(); unknowns];
    for col in (0..unknowns).rev() {
        let mut acc = rows[col][unknowns].clone();
        for t in (col + 1)..unknowns {
            acc -= fp.mul(&rows[col][t], &v[t]);
        }
        v[col] = fp.div(&acc, &rows[col][col]);
    }
    let mut out = vec![fp.from_int(&BigInt::one())];
    out.extend(v);
    out
}

/// λ = a / n^{(k−1)/2} for an integer a scaled by 2^prec.
fn normalize(a: &BigInt, prec: u32, n: usize, k: u32) -> f64 {
    let (m, e) = bigint_to_scaled_f64(a);
    if m == 0.0 {
        return 0.0;
    }
    let e2 = e - prec as i64;
    let half = (k as f64 - 1.0) / 2.0;
    if (-1000..=1000).contains(&e2) {
        let scaled = m * 2f64.powi(e2 as i32);
        if n == 1 {
            return scaled;
        }
        if scaled.is_finite() && scaled != 0.0 {
            let r = scaled * (-half * (n as f64).ln()).exp();
            if r.is_finite() && r.abs() > 1e-300 {
                return r;
            }
        }
    }
    m * (e2 as f64 * std::f64::consts::LN_2 - half * (n as f64).ln()).exp()
}

/// Scaled f64 coefficients of the characteristic polynomial of A / s.
fn scaled_charpoly(c: &[BigInt], ln_s: f64) -> Vec<f64> {
    let d = c.len() - 1;
    c.iter()
        .enumerate()
        .map(|(i, ci)| {
            let (m, e) = bigint_to_scaled_f64(ci);
            if m == 0.0 {
                0.0
            } else {
                m.signum()
                    * (m.abs().ln() + e as f64 * std::f64::consts::LN_2 - (d - i) as f64 * ln_s).exp()
            }
        })
        .collect()
}

/// Normalized Hecke eigenforms of weight k with λ-tables of length N, ordered
/// by λ(2) ascending.
pub fn hecke_eigenforms(k: u32, n: usize) -> Result<Vec<HeckeEigenform>> {
    if k % 2 == 1 || k < 4 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if n < 2 {
        return Err(Error::InsufficientTable { required: 2, available: n });
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    let basis = victor_miller_basis(k, n.max(3 * d))?;
    eigenforms_from_basis(k, n, &basis)
}

pub(crate) fn eigenforms_from_basis(k: u32, n: usize, basis: &[QSeries]) -> Result<Vec<HeckeEigenform>> {
    let d = basis.len();
    let half = (k as f64 - 1.0) / 2.0;
    let order = basis[0].order();
    let t2 = transpose(&hecke_matrix(k, 2, basis, order)?);
    // try T_2, then T_2 + c·T_3 for c = 1, 2, ...
    let mut chosen: Option<(IntMatrix, Vec<BigInt>, Vec<f64>, f64)> = None;
    let mut t3: Option<IntMatrix> = None;
    for c in 0..6i64 {
        let a = if c == 0 {
            t2.clone()
        } else {
            if t3.is_none() {
                t3 = Some(transpose(&hecke_matrix(k, 3, basis, order)?));
            }
            let t3 = t3.as_ref().unwrap();
            (0..d)
                .map(|i| (0..d).map(|j| &t2[i][j] + &t3[i][j] * c).collect())
                .collect()
        };
        let s = 2f64.powf(half) + c as f64 * 3f64.powf(half);
        let cp = charpoly(&a);
        let roots = if d == 1 {
            let (m, e) = bigint_to_scaled_f64(&-&cp[0]);
            vec![m * (e as f64 * std::f64::consts::LN_2 - s.ln()).exp()]
        } else {
            real_roots(&scaled_charpoly(&cp, s.ln()))
        };
        let separated = roots.windows(2).all(|w| (w[1] - w[0]).abs() > 1e-6 * 4.0);
        if separated {
            chosen = Some((a, cp, roots, s));
            break;
        }
    }
    let (a, cp, roots, s) = chosen.ok_or_else(|| Error::EigenspaceSeparation {
        k,
        detail: "T_2 + c·T_3 has a repeated eigenvalue for c = 0..5".into(),
    })?;
    let max_bits = basis
        .iter()
        .flat_map(|f| f.coeffs()[..=n.min(order)].iter().map(|x| x.bits()))
        .max()
        .unwrap_or(0);
    let prec = (max_bits as u32) + 128 + 8 * d as u32;
    let fp = FixedPoint::new(prec);
    let mut forms = Vec::with_capacity(d);
    for &r in &roots {
        let alpha = if d == 1 { fp.from_int(&(-&cp[0])) } else { newton_refine(&fp, &cp, r * s) };
        let v = eigenvector(&fp, &a, &alpha);
        let lambda: Vec<f64> = (1..=n)
            .map(|m| {
                if m == 1 {
                    return 1.0;
                }
                let mut acc = BigInt::zero();
                for (vj, f) in v.iter().zip(basis) {
                    acc += vj * f.coeff(m);
                }
                normalize(&acc, prec, m, k)
            })
            .collect();
        forms.push(HeckeEigenform::new(k, lambda)?);
    }
    forms.sort_by(|x, y| x.lambda(2).partial_cmp(&y.lambda(2)).unwrap());
    Ok(forms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t2_on_delta() {
        let b = victor_miller_basis(12, 10).unwrap();
        let m = hecke_matrix(12, 2, &b, 10).unwrap();
        assert_eq!(m, vec![vec![BigInt::from(-24)]]);
    }

    #[test]
    fn t1_is_identity() {
        for k in [12u32, 24, 36] {
            let b = victor_miller_basis(k, 10).unwrap();
            let m = hecke_matrix(k, 1, &b, 10).unwrap();
            for (i, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    assert_eq!(x, &BigInt::from((i == j) as i64));
                }
            }
        }
    }

    #[test]
    fn weight_24_t2_trace_and_charpoly() {
        let b = victor_miller_basis(24, 10).unwrap();
        let m = hecke_matrix(24, 2, &b, 10).unwrap();
        assert_eq!(&m[0][0] + &m[1][1], BigInt::from(1080));
        // eigenvalues 540 ± 12√144169: x² − 1080x + (540² − 144·144169)
        let cp = charpoly(&m);
        assert_eq!(cp[1], BigInt::from(-1080));
        assert_eq!(cp[0], BigInt::from(540 * 540 - 144 * 144169i64));
    }

    #[test]
    fn insufficient_truncation_reports_requirement() {
        let b = victor_miller_basis(24, 3).unwrap();
        let err = hecke_matrix(24, 2, &b, 3).unwrap_err();
        assert_eq!(err, Error::InsufficientTruncation { required: 4, available: 3 });
    }

    #[test]
    fn charpoly_of_triangular_matrix() {
        let m: IntMatrix = vec![
            vec![BigInt::from(2), BigInt::from(5), BigInt::from(-1)],
            vec![BigInt::zero(), BigInt::from(-3), BigInt::from(7)],
            vec![BigInt::zero(), BigInt::zero(), BigInt::from(4)],
        ];
        // (x − 2)(x + 3)(x − 4) = x³ − 3x² − 10x + 24
        let want: Vec<BigInt> = [24, -10, -3, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(charpoly(&m), want);
    }

    #[test]
    fn delta_eigenvalues() {
        let f = &hecke_eigenforms(12, 3).unwrap()[0];
        assert_eq!(f.lambda(1), 1.0);
        assert!((f.lambda(2) - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
        assert!((f.lambda(2) + 0.530_330_085_889_910_6).abs() < 1e-12);
        let g = &hecke_eigenforms(12, 4).unwrap()[0];
        assert!((g.lambda(4) - (g.lambda(2).powi(2) - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn weight_24_eigenvalues() {
        let forms = hecke_eigenforms(24, 2).unwrap();
        assert_eq!(forms.len(), 2);
        let r = 12.0 * 144169f64.sqrt();
        let s = 2f64.powf(11.5);
        assert!((forms[0].lambda(2) - (540.0 - r) / s).abs() < 1e-12);
        assert!((forms[1].lambda(2) - (540.0 + r) / s).abs() < 1e-12);
    }

    #[test]
    fn empty_and_invalid_weights() {
        assert!(hecke_eigenforms(10, 5).unwrap().is_empty());
        assert!(hecke_eigenforms(14, 5).unwrap().is_empty());
        assert!(hecke_eigenforms(25, 5).is_err());
    }
}
