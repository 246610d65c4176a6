use crate::error::{Error, Result};
use crate::kernel::matrix::Matrix;

/// A semi-relaxed transport instance
///
/// ```text
/// min_{T ≥ 0, Tᵀ1 = b}  ⟨T, C⟩ + (1/2λ)·‖T·1 − a‖²
/// ```
///
/// Rows of `C` (length `m`) carry the relaxed marginal `a`, columns (length
/// `n`) carry the hard marginal `b`. Immutable once built.
#[derive(Debug, Clone)]
pub struct Problem {
    cost: Matrix,
    source_marginal: Vec<f64>,
    target_marginal: Vec<f64>,
    lambda: f64,
}

impl Problem {
    pub fn new(
        cost: Matrix,
        source_marginal: Vec<f64>,
        target_marginal: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        let (m, n) = cost.shape();
        if m == 0 || n == 0 {
            return Err(Error::instance(format!(
                "cost matrix is {m}x{n}, both dimensions must be >= 1"
            )));
        }
        if !cost.is_finite() {
            return Err(Error::instance("cost matrix has non-finite entries"));
        }
        if source_marginal.len() != m {
            return Err(Error::instance(format!(
                "source marginal a has length {}, cost has m = {m} rows",
                source_marginal.len()
            )));
        }
        if target_marginal.len() != n {
            return Err(Error::instance(format!(
                "target marginal b has length {}, cost has n = {n} columns",
                target_marginal.len()
            )));
        }
        if let Some(j) = source_marginal
            .iter()
            .position(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::instance(format!(
                "a[{j}] = {} is not a nonnegative number",
                source_marginal[j]
            )));
        }
        if let Some(i) = target_marginal
            .iter()
            .position(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::instance(format!(
                "b[{i}] = {} is not a nonnegative number",
                target_marginal[i]
            )));
        }
        if target_marginal.iter().sum::<f64>() <= 0.0 {
            return Err(Error::instance(
                "target marginal b must have positive total mass",
            ));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::instance(format!(
                "lambda = {lambda} must be positive and finite"
            )));
        }
        Ok(Problem {
            cost,
            source_marginal,
            target_marginal,
            lambda,
        })
    }

    /// Number of rows (length of `a`).
    #[inline]
    pub fn m(&self) -> usize {
        self.cost.rows()
    }

    /// Number of columns, i.e. blocks (length of `b`).
    #[inline]
    pub fn n(&self) -> usize {
        self.cost.cols()
    }

    #[inline]
    pub fn cost(&self) -> &Matrix {
        &self.cost
    }

    /// Relaxed marginal `a`.
    #[inline]
    pub fn source_marginal(&self) -> &[f64] {
        &self.source_marginal
    }

    /// Hard marginal `b`.
    #[inline]
    pub fn target_marginal(&self) -> &[f64] {
        &self.target_marginal
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same instance with a different relaxation parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Problem::new(
            self.cost.clone(),
            self.source_marginal.clone(),
            self.target_marginal.clone(),
            lambda,
        )
    }

    /// Columns with `b_i > 0`; zero columns are pinned and never sampled.
    pub fn active_columns(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.target_marginal[i] > 0.0)
            .collect()
    }

    /// Largest absolute cost entry, `‖C‖_∞` in the max-entry sense.
    pub fn cost_max_abs(&self) -> f64 {
        self.cost
            .as_slice()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}
