//! Projected gradient descent and FISTA over `b_1Δ_m × … × b_nΔ_m`.
//!
//! The penalty's Hessian is `(1/λ)(1·1ᵀ ⊗ I_m)` with spectral norm `n/λ`,
//! so the default step is `λ/n`. Projection is applied column by column.

use crate::error::{Error, Result};
use crate::kernel::oracle::{duality_gap_blockwise, fill_gradient, objective_unchecked};
use crate::kernel::simplex::project_into;
use crate::kernel::{Matrix, Problem, TransportPlan};
use crate::solvers::{check_start, Monitor, NoMonitor, Recorder, SolveResult, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineAlgorithm {
    Pgd,
    Fista,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub algorithm: BaselineAlgorithm,
    pub max_iterations: u64,
    pub gap_tolerance: f64,
    /// Iterations between gap checks; `None` means `n`.
    pub gap_check_period: Option<u64>,
    /// Gradient step; `None` means `1/L = λ/n`.
    pub step_length: Option<f64>,
}

impl BaselineConfig {
    pub fn new(algorithm: BaselineAlgorithm) -> Self {
        BaselineConfig {
            algorithm,
            max_iterations: 1000,
            gap_tolerance: 0.0,
            gap_check_period: None,
            step_length: None,
        }
    }

    pub fn with_max_iterations(mut self, iterations: u64) -> Self {
        self.max_iterations = iterations;
        self
    }

    pub fn with_gap_tolerance(mut self, tol: f64) -> Self {
        self.gap_tolerance = tol;
        self
    }

    pub fn with_gap_check_period(mut self, period: u64) -> Self {
        self.gap_check_period = Some(period);
        self
    }

    pub fn with_step_length(mut self, step: f64) -> Self {
        self.step_length = Some(step);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(step) = self.step_length {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::config(format!(
                    "step length {step} must be positive"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if !(self.gap_tolerance.is_finite() && self.gap_tolerance >= 0.0) {
            return Err(Error::config(format!(
                "gap tolerance {} must be nonnegative",
                self.gap_tolerance
            )));
        }
        if self.gap_check_period == Some(0) {
            return Err(Error::config("gap check period must be at least 1"));
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self.algorithm {
            BaselineAlgorithm::Pgd => "pgd",
            BaselineAlgorithm::Fista => "fista",
        }
    }
}

/// Lipschitz constant of the gradient, `n/λ`.
pub fn lipschitz_constant(p: &Problem) -> f64 {
    p.n() as f64 / p.lambda()
}

pub fn solve_pgd(p: &Problem, cfg: &BaselineConfig, t0: &TransportPlan) -> Result<SolveResult> {
    if cfg.algorithm != BaselineAlgorithm::Pgd {
        return Err(Error::config("solve_pgd called with a FISTA configuration"));
    }
    solve_baseline_with_monitor(p, cfg, t0, &mut NoMonitor)
}

pub fn solve_fista(p: &Problem, cfg: &BaselineConfig, t0: &TransportPlan) -> Result<SolveResult> {
    if cfg.algorithm != BaselineAlgorithm::Fista {
        return Err(Error::config("solve_fista called with a PGD configuration"));
    }
    solve_baseline_with_monitor(p, cfg, t0, &mut NoMonitor)
}

/// Projected gradient step from `from` into `to`: `to = Π(from − η∇f(from))`.
struct Projector {
    rows: Vec<f64>,
    grad: Vec<f64>,
    shifted: Vec<f64>,
    scratch: Vec<f64>,
}

impl Projector {
    fn new(m: usize) -> Self {
        Projector {
            rows: vec![0.0; m],
            grad: vec![0.0; m],
            shifted: vec![0.0; m],
            scratch: Vec::with_capacity(m),
        }
    }

    fn step(&mut self, p: &Problem, eta: f64, from: &Matrix, to: &mut Matrix) {
        self.rows = from.row_sums();
        for i in 0..p.n() {
            fill_gradient(p, &self.rows, i, &mut self.grad);
            for ((s, &t), &g) in self.shifted.iter_mut().zip(from.col(i)).zip(&self.grad) {
                *s = t - eta * g;
            }
            project_into(
                &self.shifted,
                p.target_marginal()[i],
                &mut self.scratch,
                to.col_mut(i),
            );
        }
    }
}

pub fn solve_baseline(
    p: &Problem,
    cfg: &BaselineConfig,
    t0: &TransportPlan,
) -> Result<SolveResult> {
    solve_baseline_with_monitor(p, cfg, t0, &mut NoMonitor)
}

/// Runs PGD or FISTA. One iteration (one full gradient) counts as one epoch.
pub fn solve_baseline_with_monitor(
    p: &Problem,
    cfg: &BaselineConfig,
    t0: &TransportPlan,
    monitor: &mut dyn Monitor,
) -> Result<SolveResult> {
    cfg.validate()?;
    check_start(p, t0)?;

    let (m, n) = (p.m(), p.n());
    let eta = cfg.step_length.unwrap_or(1.0 / lipschitz_constant(p));
    let period = cfg.gap_check_period.unwrap_or(n as u64).max(1);
    let mut plan = t0.clone();
    let mut previous = plan.entries().clone();
    let mut extrapolated = plan.entries().clone();
    let mut projector = Projector::new(m);
    let mut grad = vec![0.0; m];
    let mut momentum = 1.0_f64;
    let mut rec = Recorder::new(monitor, 1);

    let evaluate = |plan: &TransportPlan, grad: &mut [f64]| -> (f64, f64) {
        let rows = plan.entries().row_sums();
        let gap = duality_gap_blockwise(p, plan.entries(), &rows, grad);
        (objective_unchecked(p, plan.entries(), &rows), gap)
    };

    rec.snapshot(0, &plan);
    let (obj, gap) = evaluate(&plan, &mut grad);
    rec.record(0, obj, Some(gap), &plan);
    let mut k: u64 = 0;

    let (termination, final_gap) = if gap <= cfg.gap_tolerance {
        (Termination::GapToleranceMet, gap)
    } else {
        loop {
            match cfg.algorithm {
                BaselineAlgorithm::Pgd => {
                    previous
                        .as_mut_slice()
                        .copy_from_slice(plan.entries().as_slice());
                    projector.step(p, eta, &previous, plan.entries_mut());
                }
                BaselineAlgorithm::Fista => {
                    previous
                        .as_mut_slice()
                        .copy_from_slice(plan.entries().as_slice());
                    projector.step(p, eta, &extrapolated, plan.entries_mut());
                    let next = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
                    let beta = (momentum - 1.0) / next;
                    momentum = next;
                    for ((y, &x), &x_prev) in extrapolated
                        .as_mut_slice()
                        .iter_mut()
                        .zip(plan.entries().as_slice())
                        .zip(previous.as_slice())
                    {
                        *y = x + beta * (x - x_prev);
                    }
                }
            }
            k += 1;
            rec.snapshot(k, &plan);

            if k.is_multiple_of(period) || k >= cfg.max_iterations {
                let (obj, gap) = evaluate(&plan, &mut grad);
                rec.record(k, obj, Some(gap), &plan);
                if gap <= cfg.gap_tolerance {
                    break (Termination::GapToleranceMet, gap);
                }
                if k >= cfg.max_iterations {
                    break (Termination::MaxEpochs, gap);
                }
            }
        }
    };

    Ok(SolveResult {
        plan,
        trace: rec.trace,
        termination,
        final_gap,
        iterations: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::default_initial_plan;

    fn penalty_only() -> Problem {
        Problem::new(Matrix::zeros(2, 2), vec![0.5, 0.5], vec![0.5, 0.5], 0.5).unwrap()
    }

    #[test]
    fn lipschitz_is_n_over_lambda() {
        assert_eq!(lipschitz_constant(&penalty_only()), 4.0);
    }

    #[test]
    fn config_checks() {
        assert!(BaselineConfig::new(BaselineAlgorithm::Pgd)
            .with_step_length(0.0)
            .validate()
            .is_err());
        assert!(BaselineConfig::new(BaselineAlgorithm::Pgd)
            .with_max_iterations(0)
            .validate()
            .is_err());
        let p = penalty_only();
        let t0 = default_initial_plan(&p);
        assert!(solve_pgd(&p, &BaselineConfig::new(BaselineAlgorithm::Fista), &t0).is_err());
        assert!(solve_fista(&p, &BaselineConfig::new(BaselineAlgorithm::Pgd), &t0).is_err());
    }

    #[test]
    fn pgd_reaches_penalty_optimum() {
        let p = penalty_only();
        let cfg = BaselineConfig::new(BaselineAlgorithm::Pgd)
            .with_max_iterations(10_000)
            .with_gap_tolerance(1e-12);
        let res = solve_pgd(&p, &cfg, &default_initial_plan(&p)).unwrap();
        assert!(
            res.final_objective().abs() < 1e-8,
            "{}",
            res.final_objective()
        );
        let rows = res.plan.entries().row_sums();
        assert!((rows[0] - 0.5).abs() < 1e-6 && (rows[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn stationary_point_is_fixed() {
        // C = 0 and T·1 = a: gradient vanishes
        let p = penalty_only();
        let t = TransportPlan::for_problem(
            &p,
            Matrix::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap(),
        )
        .unwrap();
        let cfg = BaselineConfig::new(BaselineAlgorithm::Pgd)
            .with_max_iterations(5)
            .with_gap_check_period(1);
        let res = solve_baseline(&p, &cfg, &t).unwrap();
        assert_eq!(res.termination, Termination::GapToleranceMet);
        assert_eq!(res.plan, t);
    }
}
