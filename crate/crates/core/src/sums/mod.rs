//! Shifted convolution sums of Hecke eigenvalues, window functions with
//! their Sobolev norms, and the shifted Dirichlet series D_f(s, h).

mod dirichlet;
mod shifted;
mod window;

pub use dirichlet::{dirichlet_series, ComplexPoint, DirichletValue};
pub use shifted::{rankin_statistic, sharp_sum, smooth_range, smooth_sum, weighted_sum};
pub use window::{make_window, sobolev_norm, NormP, Window, WindowKind};
