use crate::error::{Error, Result};
use crate::kernel::oracle::{argmin_index, fill_gradient, objective_unchecked};
use crate::kernel::{Problem, TransportPlan};
use crate::solvers::{
    check_start, decay_stepsize, Algorithm, Monitor, NoMonitor, Recorder, SolveResult,
    SolverConfig, StepRule, Termination,
};

/// Consecutive zero-step iterations (with the gap above tolerance) that end a run.
const STALL_ITERATIONS: u32 = 3;

/// Full Frank-Wolfe: every iteration solves the LMO on all `n` columns and
/// moves `T ← (1−γ)T + γS`. The gap is available for free and is recorded
/// every iteration.
pub fn solve_fw(p: &Problem, cfg: &SolverConfig, t0: &TransportPlan) -> Result<SolveResult> {
    run(p, cfg, t0, &mut NoMonitor)
}

pub(crate) fn run(
    p: &Problem,
    cfg: &SolverConfig,
    t0: &TransportPlan,
    monitor: &mut dyn Monitor,
) -> Result<SolveResult> {
    cfg.validate()?;
    if cfg.algorithm != Algorithm::Fw {
        return Err(Error::config(format!(
            "solve_fw called with {}",
            cfg.label()
        )));
    }
    check_start(p, t0)?;

    let (m, n) = (p.m(), p.n());
    let b = p.target_marginal();
    let mut plan = t0.clone();
    let mut rows = plan.entries().row_sums();
    let mut grad = vec![0.0; m];
    let mut vertex = vec![0usize; n];
    let mut vertex_rows = vec![0.0; m];
    let mut rec = Recorder::new(monitor, 1);
    let mut k: u64 = 0;
    let mut zero_steps = 0;
    rec.snapshot(0, &plan);

    let (termination, final_gap) = loop {
        // LMO on every column, gap as a by-product
        let mut gap = 0.0;
        vertex_rows.fill(0.0);
        for i in 0..n {
            fill_gradient(p, &rows, i, &mut grad);
            let j = argmin_index(&grad);
            vertex[i] = j;
            vertex_rows[j] += b[i];
            let inner: f64 = plan.column(i).iter().zip(&grad).map(|(t, g)| t * g).sum();
            gap += inner - b[i] * grad[j];
        }
        let obj = objective_unchecked(p, plan.entries(), &rows);
        rec.record(k, obj, Some(gap), &plan);

        if gap <= cfg.gap_tolerance {
            break (Termination::GapToleranceMet, gap);
        }
        if zero_steps >= STALL_ITERATIONS {
            break (Termination::Stalled, gap);
        }
        if k >= cfg.max_epochs {
            break (Termination::MaxEpochs, gap);
        }

        let gamma = match cfg.stepsize {
            StepRule::Decay => decay_stepsize(k, n, false),
            StepRule::LineSearch => {
                // f(T + γ(S − T)) is quadratic in γ with slope −gap at 0 and
                // curvature ‖(S − T)·1‖²/λ.
                let curvature: f64 = vertex_rows
                    .iter()
                    .zip(&rows)
                    .map(|(s, t)| (s - t) * (s - t))
                    .sum();
                if curvature > 0.0 {
                    (p.lambda() * gap / curvature).clamp(0.0, 1.0)
                } else if gap > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };

        let mut moved = false;
        if gamma > 0.0 {
            let entries = plan.entries_mut();
            for i in 0..n {
                let j = vertex[i];
                let col = entries.col_mut(i);
                for (l, t) in col.iter_mut().enumerate() {
                    let target = if l == j { b[i] } else { 0.0 };
                    let new = if gamma >= 1.0 {
                        target
                    } else {
                        (1.0 - gamma) * *t + gamma * target
                    };
                    moved |= new != *t;
                    *t = new;
                }
            }
        }
        zero_steps = if moved { 0 } else { zero_steps + 1 };
        rows = plan.entries().row_sums();
        k += 1;
        rec.snapshot(k, &plan);
    };

    Ok(SolveResult {
        plan,
        trace: rec.trace,
        termination,
        final_gap,
        iterations: k,
    })
}
