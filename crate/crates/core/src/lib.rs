//! Numerical laboratory for shifted convolution sums of Hecke eigenforms of
//! level one: exact q-expansions, Hecke eigenbases, Petersson norms and
//! symmetric-square L-values, windowed coefficient sums and variance
//! experiments against the Petersson trace formula.

pub mod error;
pub mod numeric;
pub mod special;

pub use error::{Error, Result};
pub mod qarith;
pub mod petersson;
pub mod sums;
pub mod experiments;
