//! Numerical building blocks shared by the higher-level modules: compensated
//! accumulation, double-double arithmetic, fixed-point big-integer reals,
//! quadrature, least-squares fits and the complex log-gamma function.

mod fit;
mod fixed;
mod gamma;
mod parallel;
mod quad;
mod sum;

pub use fit::{linear_fit, LineFit};
pub use fixed::{bigint_log2, bigint_to_scaled_f64, FixedPoint};
pub use gamma::{ln_gamma, ln_gamma_complex};
pub use parallel::par_map;
pub use quad::{gauss_legendre, integrate_adaptive, integrate_gl_panels, Quadrature};
pub use sum::{DoubleDouble, KahanSum};

/// ζ(2) = π²/6.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
