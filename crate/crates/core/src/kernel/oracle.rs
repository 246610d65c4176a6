//! Objective, block gradients, and the two vertex oracles.
//!
//! With `r = T·1_n − a`, the gradient restricted to column `i` is
//! `c_i + r/λ`. Every block shares the same penalty term, so one O(m) pass
//! over the cached row sums yields any block gradient.

use crate::error::{Error, Result};
use crate::kernel::matrix::Matrix;
use crate::kernel::plan::{RowSumCache, TransportPlan};
use crate::kernel::problem::Problem;

/// Gradient of the objective restricted to one column.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBlock {
    pub values: Vec<f64>,
    pub column_index: usize,
}

/// Selects which active atom the away oracle returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AwayRule {
    /// Worst active atom (largest gradient entry). Standard away step.
    #[default]
    Argmax,
    /// Best active atom, the literal minimisation form. Kept for comparison.
    Argmin,
}

fn check_plan_shape(p: &Problem, t: &TransportPlan) -> Result<()> {
    if (t.m(), t.n()) != (p.m(), p.n()) {
        return Err(Error::instance(format!(
            "plan is {}x{}, problem is m = {} by n = {}",
            t.m(),
            t.n(),
            p.m(),
            p.n()
        )));
    }
    Ok(())
}

/// `f(T) = ⟨T, C⟩ + (1/2λ)·‖T·1_n − a‖²`.
pub fn objective(p: &Problem, t: &TransportPlan) -> Result<f64> {
    check_plan_shape(p, t)?;
    Ok(objective_unchecked(p, t.entries(), &t.entries().row_sums()))
}

pub(crate) fn objective_unchecked(p: &Problem, entries: &Matrix, row_sums: &[f64]) -> f64 {
    let linear = entries.dot(p.cost());
    linear + penalty(p, row_sums)
}

/// `(1/2λ)·‖r − a‖²` for the given row sums.
pub(crate) fn penalty(p: &Problem, row_sums: &[f64]) -> f64 {
    let sq: f64 = row_sums
        .iter()
        .zip(p.source_marginal())
        .map(|(r, a)| (r - a) * (r - a))
        .sum();
    sq / (2.0 * p.lambda())
}

/// `c_i + (1/λ)(T·1_n − a)` in O(m).
pub fn gradient_block(p: &Problem, row_sums: &RowSumCache, i: usize) -> Result<GradientBlock> {
    if i >= p.n() {
        return Err(Error::instance(format!(
            "column index {i} out of range for n = {}",
            p.n()
        )));
    }
    let sums = row_sums.row_sums()?;
    if sums.len() != p.m() {
        return Err(Error::instance(format!(
            "row-sum cache has length {}, problem has m = {}",
            sums.len(),
            p.m()
        )));
    }
    let mut values = vec![0.0; p.m()];
    fill_gradient(p, sums, i, &mut values);
    Ok(GradientBlock {
        values,
        column_index: i,
    })
}

#[inline]
pub(crate) fn fill_gradient(p: &Problem, row_sums: &[f64], i: usize, out: &mut [f64]) {
    let inv_lambda = 1.0 / p.lambda();
    for (((g, &c), &r), &a) in out
        .iter_mut()
        .zip(p.cost().col(i))
        .zip(row_sums)
        .zip(p.source_marginal())
    {
        *g = c + (r - a) * inv_lambda;
    }
}

/// Index of the smallest entry; ties resolve to the lowest index.
#[inline]
pub fn argmin_index(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (j, &v) in values.iter().enumerate() {
        if v < best_value {
            best = j;
            best_value = v;
        }
    }
    best
}

/// Linear minimisation over `b_i·Δ_m`: returns `b_i·e_j` with
/// `j = argmin_k g[k]`.
pub fn lmo_block(g: &GradientBlock, b_i: f64) -> Result<Vec<f64>> {
    if g.values.is_empty() {
        return Err(Error::instance("gradient block is empty"));
    }
    if b_i.is_nan() || b_i < 0.0 {
        return Err(Error::instance(format!(
            "column mass {b_i} must be nonnegative"
        )));
    }
    let mut s = vec![0.0; g.values.len()];
    s[argmin_index(&g.values)] = b_i;
    Ok(s)
}

/// Active atom of column `t_i` chosen by `rule`, over rows whose entry exceeds
/// `tol`. `None` when the column has empty support.
#[inline]
pub(crate) fn away_index(
    values: &[f64],
    column: &[f64],
    tol: f64,
    rule: AwayRule,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, (&g, &t)) in values.iter().zip(column).enumerate() {
        if t <= tol {
            continue;
        }
        let better = match (best, rule) {
            (None, _) => true,
            (Some((_, bv)), AwayRule::Argmax) => g > bv,
            (Some((_, bv)), AwayRule::Argmin) => g < bv,
        };
        if better {
            best = Some((j, g));
        }
    }
    best.map(|(j, _)| j)
}

/// Away atom of column `t_i`: the active row with the largest gradient entry
/// (lowest index on ties), returned with its vertex `b_i·e_j`.
///
/// The active set uses the default threshold `1e-12·b_i`.
pub fn away_oracle_block(g: &GradientBlock, t_i: &[f64], b_i: f64) -> Result<(usize, Vec<f64>)> {
    away_oracle_block_with(
        g,
        t_i,
        b_i,
        b_i * crate::kernel::plan::DEFAULT_SUPPORT_REL_TOL,
        AwayRule::Argmax,
    )
}

/// [`away_oracle_block`] with an explicit support threshold and selection rule.
pub fn away_oracle_block_with(
    g: &GradientBlock,
    t_i: &[f64],
    b_i: f64,
    tol: f64,
    rule: AwayRule,
) -> Result<(usize, Vec<f64>)> {
    if g.values.len() != t_i.len() {
        return Err(Error::instance(format!(
            "gradient has length {}, column has length {}",
            g.values.len(),
            t_i.len()
        )));
    }
    let j = away_index(&g.values, t_i, tol, rule).ok_or_else(|| {
        Error::instance(format!("column {} has an empty active set", g.column_index))
    })?;
    let mut v = vec![0.0; t_i.len()];
    v[j] = b_i;
    Ok((j, v))
}

/// Column-wise LMO solution `S` for the current plan.
pub fn lmo_full(p: &Problem, t: &TransportPlan) -> Result<Matrix> {
    check_plan_shape(p, t)?;
    let row_sums = t.entries().row_sums();
    let mut grad = vec![0.0; p.m()];
    let mut s = Matrix::zeros(p.m(), p.n());
    for i in 0..p.n() {
        fill_gradient(p, &row_sums, i, &mut grad);
        let j = argmin_index(&grad);
        s.set(j, i, p.target_marginal()[i]);
    }
    Ok(s)
}

/// `g(T) = ⟨T − S, C⟩ + (1/λ)⟨T·1 − S·1, T·1 − a⟩` for a given LMO solution `S`.
pub fn duality_gap(p: &Problem, t: &TransportPlan, s: &Matrix) -> Result<f64> {
    check_plan_shape(p, t)?;
    if s.shape() != (p.m(), p.n()) {
        return Err(Error::instance(format!(
            "LMO solution is {}x{}, problem is m = {} by n = {}",
            s.rows(),
            s.cols(),
            p.m(),
            p.n()
        )));
    }
    let t_rows = t.entries().row_sums();
    let s_rows = s.row_sums();
    let linear = t.entries().dot(p.cost()) - s.dot(p.cost());
    let quad: f64 = t_rows
        .iter()
        .zip(&s_rows)
        .zip(p.source_marginal())
        .map(|((tr, sr), a)| (tr - sr) * (tr - a))
        .sum();
    Ok(linear + quad / p.lambda())
}

/// Duality gap computed block by block as `Σ_i ⟨t_i, ∇_i f⟩ − b_i·min_j ∇_i f[j]`,
/// without materialising `S`. `grad` is scratch space of length m.
pub(crate) fn duality_gap_blockwise(
    p: &Problem,
    entries: &Matrix,
    row_sums: &[f64],
    grad: &mut [f64],
) -> f64 {
    let mut gap = 0.0;
    for i in 0..p.n() {
        fill_gradient(p, row_sums, i, grad);
        let j = argmin_index(grad);
        let inner: f64 = entries
            .col(i)
            .iter()
            .zip(grad.iter())
            .map(|(t, g)| t * g)
            .sum();
        gap += inner - p.target_marginal()[i] * grad[j];
    }
    gap
}

/// Duality gap of `t` (solves the LMO internally).
pub fn duality_gap_of(p: &Problem, t: &TransportPlan) -> Result<f64> {
    check_plan_shape(p, t)?;
    let mut grad = vec![0.0; p.m()];
    Ok(duality_gap_blockwise(
        p,
        t.entries(),
        &t.entries().row_sums(),
        &mut grad,
    ))
}
