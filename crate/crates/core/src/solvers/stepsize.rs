use crate::error::{Error, Result};
use crate::kernel::{Problem, RowSumCache};

/// Decay stepsize: `2/(k+2)` for full Frank-Wolfe, `2n/(k+2n)` for block
/// updates over `n` blocks.
pub fn decay_stepsize(k: u64, n: usize, blockwise: bool) -> f64 {
    if blockwise {
        let two_n = 2.0 * n as f64;
        two_n / (k as f64 + two_n)
    } else {
        2.0 / (k as f64 + 2.0)
    }
}

/// Outcome of an exact line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub gamma: f64,
    /// The direction was zero, no step is possible.
    pub stalled: bool,
}

/// Exact minimiser of `γ ↦ f(t_i + γ·d)` over `[0, gamma_max]` for a
/// direction `d` on column `i`:
///
/// ```text
/// γ = clip( (λ⟨−d, c_i⟩ + ⟨−d, T·1 − a⟩) / ‖d‖², 0, gamma_max )
/// ```
///
/// The objective is exactly quadratic along `d`, so this is the true
/// minimiser. A zero direction returns `γ = 0` flagged as stalled.
pub fn exact_line_search(
    p: &Problem,
    row_sums: &RowSumCache,
    i: usize,
    d: &[f64],
    gamma_max: f64,
) -> Result<LineSearch> {
    if i >= p.n() {
        return Err(Error::instance(format!(
            "column index {i} out of range for n = {}",
            p.n()
        )));
    }
    if d.len() != p.m() {
        return Err(Error::instance(format!(
            "direction has length {}, problem has m = {}",
            d.len(),
            p.m()
        )));
    }
    if gamma_max.is_nan() || gamma_max < 0.0 {
        return Err(Error::instance(format!(
            "gamma_max = {gamma_max} must be nonnegative"
        )));
    }
    Ok(line_search_raw(p, row_sums.row_sums()?, i, d, gamma_max))
}

#[inline]
pub(crate) fn line_search_raw(
    p: &Problem,
    row_sums: &[f64],
    i: usize,
    d: &[f64],
    gamma_max: f64,
) -> LineSearch {
    let lambda = p.lambda();
    let mut num = 0.0;
    let mut den = 0.0;
    for (((&dj, &c), &r), &a) in d
        .iter()
        .zip(p.cost().col(i))
        .zip(row_sums)
        .zip(p.source_marginal())
    {
        num -= lambda * dj * c + dj * (r - a);
        den += dj * dj;
    }
    if den == 0.0 {
        return LineSearch {
            gamma: 0.0,
            stalled: true,
        };
    }
    let gamma = (num / den).clamp(0.0, gamma_max);
    LineSearch {
        gamma,
        stalled: false,
    }
}
