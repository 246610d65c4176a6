use crate::error::{Error, Result};
use crate::kernel::matrix::Matrix;
use crate::kernel::problem::Problem;

/// Default relative support threshold: entry `(j, i)` is in the active set of
/// column `i` when it exceeds `DEFAULT_SUPPORT_REL_TOL · b_i`.
pub const DEFAULT_SUPPORT_REL_TOL: f64 = 1e-12;

/// Absolute column-sum slack accepted by [`TransportPlan::new`], scaled by
/// `max(1, b_i)`.
pub const COLUMN_SUM_TOL: f64 = 1e-9;

/// Negative slack tolerated on entries after floating arithmetic.
pub const NONNEG_TOL: f64 = 1e-12;

/// A feasible point of `b_1Δ_m × … × b_nΔ_m`.
///
/// Column `i` lives on the scaled simplex `b_i·Δ_m`. Its active set is the
/// support `{ j : T[j,i] > support_rel_tol · b_i }`; the vertex coefficient
/// of `e_j` is `T[j,i] / b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    entries: Matrix,
    masses: Vec<f64>,
    support_rel_tol: f64,
}

impl TransportPlan {
    /// Wraps `entries` as a plan whose columns must sum to `masses`.
    pub fn new(entries: Matrix, masses: Vec<f64>) -> Result<Self> {
        let plan = TransportPlan {
            entries,
            masses,
            support_rel_tol: DEFAULT_SUPPORT_REL_TOL,
        };
        plan.check_feasible()?;
        Ok(plan)
    }

    /// Wraps `entries` using their own column sums as the masses.
    pub fn from_matrix(entries: Matrix) -> Result<Self> {
        let masses = entries.col_sums();
        TransportPlan::new(entries, masses)
    }

    /// Plan for `problem` with the given entries; checks shape and feasibility.
    pub fn for_problem(problem: &Problem, entries: Matrix) -> Result<Self> {
        if entries.shape() != (problem.m(), problem.n()) {
            return Err(Error::instance(format!(
                "plan is {}x{}, problem is m = {} by n = {}",
                entries.rows(),
                entries.cols(),
                problem.m(),
                problem.n()
            )));
        }
        TransportPlan::new(entries, problem.target_marginal().to_vec())
    }

    pub(crate) fn from_parts_unchecked(
        entries: Matrix,
        masses: Vec<f64>,
        support_rel_tol: f64,
    ) -> Self {
        TransportPlan {
            entries,
            masses,
            support_rel_tol,
        }
    }

    pub fn with_support_rel_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::instance(format!(
                "support tolerance {tol} must be nonnegative"
            )));
        }
        self.support_rel_tol = tol;
        Ok(self)
    }

    /// Verifies nonnegativity and column sums.
    pub fn check_feasible(&self) -> Result<()> {
        if self.masses.len() != self.entries.cols() {
            return Err(Error::instance(format!(
                "plan has {} columns but {} column masses",
                self.entries.cols(),
                self.masses.len()
            )));
        }
        if !self.entries.is_finite() {
            return Err(Error::instance("plan has non-finite entries"));
        }
        let min = self.min_entry();
        if min < -NONNEG_TOL {
            return Err(Error::instance(format!("plan has negative entry {min}")));
        }
        let err = self.max_column_error();
        if err > COLUMN_SUM_TOL {
            return Err(Error::instance(format!(
                "plan column sums deviate from b by {err} (relative to max(1, b_i))"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Matrix {
        &mut self.entries
    }

    #[inline]
    pub fn column(&self, i: usize) -> &[f64] {
        self.entries.col(i)
    }

    /// The column masses `b`.
    #[inline]
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    #[inline]
    pub fn support_rel_tol(&self) -> f64 {
        self.support_rel_tol
    }

    /// Absolute support threshold for column `i`.
    #[inline]
    pub fn support_tolerance(&self, i: usize) -> f64 {
        self.support_rel_tol * self.masses[i]
    }

    pub fn m(&self) -> usize {
        self.entries.rows()
    }

    pub fn n(&self) -> usize {
        self.entries.cols()
    }

    /// Rows in the active set of column `i`.
    pub fn active_set(&self, i: usize) -> Vec<usize> {
        let tol = self.support_tolerance(i);
        self.column(i)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > tol)
            .map(|(j, _)| j)
            .collect()
    }

    /// Fraction of entries at or below the support threshold of their column.
    pub fn sparsity(&self) -> f64 {
        let total = self.m() * self.n();
        if total == 0 {
            return 1.0;
        }
        let zeros: usize = (0..self.n())
            .map(|i| {
                let tol = self.support_tolerance(i);
                self.column(i).iter().filter(|&&v| v <= tol).count()
            })
            .sum();
        zeros as f64 / total as f64
    }

    /// Largest `|Σ_j T[j,i] − b_i| / max(1, b_i)` over columns.
    pub fn max_column_error(&self) -> f64 {
        self.entries
            .columns()
            .zip(&self.masses)
            .map(|(c, &b)| (c.iter().sum::<f64>() - b).abs() / b.max(1.0))
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.entries
            .as_slice()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Cached `T·1_n`, kept in sync with column updates.
///
/// Column updates adjust it in O(m); [`RowSumCache::rebuild`] recomputes it
/// from scratch in O(mn) to shed accumulated rounding.
#[derive(Debug, Clone)]
pub struct RowSumCache {
    row_sums: Vec<f64>,
    dirty: bool,
}

impl RowSumCache {
    pub fn new(plan: &TransportPlan) -> Self {
        RowSumCache {
            row_sums: plan.entries().row_sums(),
            dirty: false,
        }
    }

    pub fn rebuild(&mut self, plan: &TransportPlan) {
        self.row_sums = plan.entries().row_sums();
        self.dirty = false;
    }

    /// Marks the cache stale; [`RowSumCache::row_sums`] will refuse until rebuilt.
    pub fn invalidate(&mut self) {
        self.dirty = true;
    }

    pub fn is_clean(&self) -> bool {
        !self.dirty
    }

    /// `T·1_n`. Errors when the cache is dirty.
    pub fn row_sums(&self) -> Result<&[f64]> {
        if self.dirty {
            return Err(Error::instance(
                "row-sum cache is stale; rebuild before use",
            ));
        }
        Ok(&self.row_sums)
    }

    #[inline]
    pub(crate) fn sums(&self) -> &[f64] {
        &self.row_sums
    }

    #[inline]
    pub(crate) fn add(&mut self, row: usize, delta: f64) {
        self.row_sums[row] += delta;
    }

    /// Applies the change of one column from `old` to `new`.
    pub fn update_column(&mut self, old: &[f64], new: &[f64]) {
        for ((s, o), n) in self.row_sums.iter_mut().zip(old).zip(new) {
            *s += n - o;
        }
    }
}
