//! Exact q-expansion arithmetic and Hecke eigenvalue tables.

mod eigenform;
mod forms;
mod hecke;
pub(crate) mod ntt;
mod series;

pub use eigenform::HeckeEigenform;
pub use forms::{delta_qexp, dim_cusp_forms, eisenstein_qexp, victor_miller_basis};
pub use hecke::{charpoly, hecke_eigenforms, hecke_matrix, IntMatrix};
pub use series::QSeries;

/// The normalized eigenform Δ with λ(n) = τ(n)/n^{11/2} for n ≤ N.
pub fn delta_eigenform(n: usize) -> HeckeEigenform {
    let d = delta_qexp(n);
    let lambda = (1..=n)
        .map(|m| {
            let (mant, e) = crate::numeric::bigint_to_scaled_f64(d.coeff(m));
            mant * (e as f64 * std::f64::consts::LN_2 - 5.5 * (m as f64).ln()).exp()
        })
        .collect::<Vec<_>>();
    let mut lambda = lambda;
    lambda[0] = 1.0;
    HeckeEigenform::new(12, lambda).expect("τ(1) = 1")
}
