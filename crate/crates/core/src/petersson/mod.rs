//! Petersson norms, symmetric-square L-values and the Petersson trace formula.

mod norm;
mod sym2;
mod trace;

pub use norm::{normalized_petersson_norm, petersson_norm, petersson_norm_ln, NormalizedNorm};
pub use sym2::{sym2_l1, sym2_l1_triangulate, Sym2Method, Sym2Triangulation};
pub use trace::{shared_kloosterman, trace_formula_lhs, trace_formula_rhs, TraceFormulaResult, Truncation};
