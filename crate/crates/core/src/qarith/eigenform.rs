use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A normalized Hecke eigenform of level one, represented by its table of
/// Hecke eigenvalues λ(n) = a(n)/n^{(k−1)/2}, 1 ≤ n ≤ N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeckeEigenform {
    k: u32,
    /// lambda[n − 1] = λ(n)
    lambda: Vec<f64>,
    pub petersson_norm: Option<f64>,
    pub sym2_l1: Option<f64>,
}

impl HeckeEigenform {
    /// Builds a form from λ(1), …, λ(N); λ(1) must be exactly 1.
    pub fn new(k: u32, lambda: Vec<f64>) -> Result<Self> {
        match lambda.first() {
            Some(&x) if x == 1.0 => {}
            Some(&x) => return Err(Error::Domain(format!("λ(1) must be 1, got {x}"))),
            None => return Err(Error::InsufficientTable { required: 1, available: 0 }),
        }
        if let Some(bad) = lambda.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("λ({}) is not finite", bad + 1)));
        }
        Ok(Self { k, lambda, petersson_norm: None, sym2_l1: None })
    }

    /// A table that is not an eigenform (used for degenerate test inputs such
    /// as the zero table); λ(1) is not checked.
    pub fn from_raw_table(k: u32, lambda: Vec<f64>) -> Self {
        Self { k, lambda, petersson_norm: None, sym2_l1: None }
    }

    pub fn weight(&self) -> u32 {
        self.k
    }

    /// Table length N.
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// λ(n) for 1 ≤ n ≤ N.
    ///
    /// # Panics
    /// If n is 0 or beyond the table.
    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n - 1]
    }

    /// λ(1), …, λ(N).
    pub fn table(&self) -> &[f64] {
        &self.lambda
    }

    /// Fails unless the table reaches n.
    pub fn require(&self, n: usize) -> Result<()> {
        if n > self.lambda.len() {
            Err(Error::InsufficientTable { required: n, available: self.lambda.len() })
        } else {
            Ok(())
        }
    }

    pub fn with_sym2_l1(mut self, value: f64) -> Self {
        self.sym2_l1 = Some(value);
        self
    }

    pub fn with_petersson_norm(mut self, value: f64) -> Self {
        self.petersson_norm = Some(value);
        self
    }

    /// Copy restricted to λ(1..=n).
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.lambda.truncate(n);
        out
    }
}
