//! Frank-Wolfe family solvers: full FW, block-coordinate FW with uniform or
//! permutation sampling, and the away-step and pairwise block variants.

mod block;
mod bound;
mod fw;
mod stepsize;
mod trace;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::plan::COLUMN_SUM_TOL;
use crate::kernel::{AwayRule, Matrix, Problem, TransportPlan};

pub use block::{solve_bcafw, solve_bcfw, solve_bcpfw};
pub use bound::{theorem1_bound, theorem1_iterations};
pub use fw::solve_fw;
pub use stepsize::{decay_stepsize, exact_line_search, LineSearch};
pub use trace::{parse_trace_csv, write_trace_csv, Monitor, NoMonitor, TraceRecord, TRACE_HEADER};

pub(crate) use trace::Recorder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Full Frank-Wolfe: every column per iteration.
    Fw,
    /// Block-coordinate Frank-Wolfe.
    Bcfw,
    /// Block-coordinate Frank-Wolfe with away steps.
    Bcafw,
    /// Block-coordinate Frank-Wolfe with pairwise steps.
    Bcpfw,
}

impl Algorithm {
    pub fn is_blockwise(self) -> bool {
        !matches!(self, Algorithm::Fw)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fw" => Ok(Algorithm::Fw),
            "bcfw" => Ok(Algorithm::Bcfw),
            "bcafw" => Ok(Algorithm::Bcafw),
            "bcpfw" => Ok(Algorithm::Bcpfw),
            other => Err(Error::config(format!(
                "unknown Frank-Wolfe algorithm {other:?}"
            ))),
        }
    }
}

/// Column sampling for block methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Uniform,
    /// Cyclic pass over a permutation reshuffled every epoch.
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// `2/(k+2)` (FW) or `2n/(k+2n)` (block methods).
    Decay,
    /// Exact minimisation along the step direction.
    #[default]
    LineSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub sampling: Sampling,
    pub stepsize: StepRule,
    /// One epoch is `n` block updates, or one full FW iteration.
    pub max_epochs: u64,
    pub gap_tolerance: f64,
    /// Iterations between duality-gap checks; `None` means `n` for block
    /// methods. Full FW checks every iteration regardless.
    pub gap_check_period: Option<u64>,
    pub rng_seed: u64,
    pub away_rule: AwayRule,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            sampling: Sampling::Uniform,
            stepsize: StepRule::LineSearch,
            max_epochs: 1000,
            gap_tolerance: 0.0,
            gap_check_period: None,
            rng_seed: 0,
            away_rule: AwayRule::Argmax,
        }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_stepsize(mut self, stepsize: StepRule) -> Self {
        self.stepsize = stepsize;
        self
    }

    pub fn with_max_epochs(mut self, epochs: u64) -> Self {
        self.max_epochs = epochs;
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

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_away_rule(mut self, rule: AwayRule) -> Self {
        self.away_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithm == Algorithm::Fw && self.sampling == Sampling::Permutation {
            return Err(Error::config(
                "permutation sampling applies to block methods only, not fw",
            ));
        }
        if matches!(self.algorithm, Algorithm::Bcafw | Algorithm::Bcpfw)
            && self.stepsize != StepRule::LineSearch
        {
            return Err(Error::config(format!(
                "{} needs exact line search to bound its away/pairwise steps",
                self.label()
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::config("max_epochs must be at least 1"));
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

    pub(crate) fn gap_period(&self, n: usize) -> u64 {
        self.gap_check_period.unwrap_or(n as u64).max(1)
    }

    /// Short name such as `fw-dec`, `bcfw-u-els`, `bcpfw`.
    pub fn label(&self) -> String {
        let step = match self.stepsize {
            StepRule::Decay => "dec",
            StepRule::LineSearch => "els",
        };
        let sampling = match self.sampling {
            Sampling::Uniform => "u",
            Sampling::Permutation => "p",
        };
        match self.algorithm {
            Algorithm::Fw => format!("fw-{step}"),
            Algorithm::Bcfw => format!("bcfw-{sampling}-{step}"),
            Algorithm::Bcafw => "bcafw".to_string(),
            Algorithm::Bcpfw => "bcpfw".to_string(),
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(Algorithm::Bcfw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GapToleranceMet,
    MaxEpochs,
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::GapToleranceMet => "gap_tolerance_met",
            Termination::MaxEpochs => "max_epochs",
            Termination::Stalled => "stalled",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub plan: TransportPlan,
    pub trace: Vec<TraceRecord>,
    pub termination: Termination,
    pub final_gap: f64,
    pub iterations: u64,
}

impl SolveResult {
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.objective)
    }

    /// First epoch at which a recorded gap is at most `tol`.
    pub fn epochs_to_gap(&self, tol: f64) -> Option<f64> {
        self.trace
            .iter()
            .find(|r| r.duality_gap.is_some_and(|g| g <= tol))
            .map(|r| r.epoch)
    }

    /// First iteration at which a recorded gap is at most `tol`.
    pub fn iterations_to_gap(&self, tol: f64) -> Option<u64> {
        self.trace
            .iter()
            .find(|r| r.duality_gap.is_some_and(|g| g <= tol))
            .map(|r| r.iteration)
    }
}

/// Initial plan with row 0 equal to `b` and every other row zero, so each
/// column sits on the vertex `b_i·e_0`.
pub fn default_initial_plan(p: &Problem) -> TransportPlan {
    let mut entries = Matrix::zeros(p.m(), p.n());
    for (i, &b) in p.target_marginal().iter().enumerate() {
        entries.set(0, i, b);
    }
    TransportPlan::from_parts_unchecked(
        entries,
        p.target_marginal().to_vec(),
        crate::kernel::plan::DEFAULT_SUPPORT_REL_TOL,
    )
}

/// Fraction of entries of `t` at or below its support threshold.
pub fn sparsity(t: &TransportPlan) -> f64 {
    t.sparsity()
}

/// Checks that `t0` is a feasible starting point for `p`.
pub(crate) fn check_start(p: &Problem, t0: &TransportPlan) -> Result<()> {
    if (t0.m(), t0.n()) != (p.m(), p.n()) {
        return Err(Error::instance(format!(
            "initial plan is {}x{}, problem is m = {} by n = {}",
            t0.m(),
            t0.n(),
            p.m(),
            p.n()
        )));
    }
    t0.check_feasible()?;
    for (i, (col, &b)) in t0.entries().columns().zip(p.target_marginal()).enumerate() {
        let sum: f64 = col.iter().sum();
        if (sum - b).abs() > COLUMN_SUM_TOL * b.max(1.0) {
            return Err(Error::instance(format!(
                "initial plan column {i} sums to {sum}, b_{i} = {b}"
            )));
        }
    }
    Ok(())
}

/// Runs the configured Frank-Wolfe variant.
pub fn solve(p: &Problem, cfg: &SolverConfig, t0: &TransportPlan) -> Result<SolveResult> {
    solve_with_monitor(p, cfg, t0, &mut NoMonitor)
}

pub fn solve_with_monitor(
    p: &Problem,
    cfg: &SolverConfig,
    t0: &TransportPlan,
    monitor: &mut dyn Monitor,
) -> Result<SolveResult> {
    match cfg.algorithm {
        Algorithm::Fw => fw::run(p, cfg, t0, monitor),
        Algorithm::Bcfw | Algorithm::Bcafw | Algorithm::Bcpfw => block::run(p, cfg, t0, monitor),
    }
}
