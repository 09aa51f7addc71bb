//! Numerical experiments around the variance of smooth shifted sums, the
//! mean square of sharp sums, and scans of smooth sums.

mod meansquare;
mod variance;

pub use meansquare::{
    meansquare_experiment, meansquare_integral, smooth_bound_scan, DecadeAggregate, ExponentFit, MeanSquarePoint,
    MeanSquareReport, ScanPoint, SmoothScanReport, SCAN_EXPONENT,
};
pub use variance::{
    diagonal_solutions, eigenforms_with_l_values, main_term, variance_experiment, variance_lhs_eigen,
    variance_lhs_petersson, PeterssonVariance, VarianceConfig, VariancePoint, VarianceReport,
};
