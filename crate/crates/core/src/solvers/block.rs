//! Block-coordinate Frank-Wolfe and its away-step and pairwise variants.
//!
//! Each iteration touches a single column: one O(m) gradient pass over the
//! cached row sums, one vertex oracle, one line search, and an O(m) (or, for
//! pairwise steps, O(1)) update of the column and the row-sum cache. The full
//! duality gap costs O(mn) and is evaluated only at checkpoints.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::oracle::{
    argmin_index, away_index, duality_gap_blockwise, fill_gradient, objective_unchecked,
};
use crate::kernel::{AwayRule, Problem, RowSumCache, TransportPlan};
use crate::solvers::stepsize::line_search_raw;
use crate::solvers::{
    check_start, decay_stepsize, Algorithm, Monitor, NoMonitor, Recorder, Sampling, SolveResult,
    SolverConfig, StepRule, Termination,
};

/// Block-coordinate Frank-Wolfe with uniform or permutation sampling.
pub fn solve_bcfw(p: &Problem, cfg: &SolverConfig, t0: &TransportPlan) -> Result<SolveResult> {
    expect(cfg, Algorithm::Bcfw)?;
    run(p, cfg, t0, &mut NoMonitor)
}

/// Block-coordinate Frank-Wolfe with away steps.
pub fn solve_bcafw(p: &Problem, cfg: &SolverConfig, t0: &TransportPlan) -> Result<SolveResult> {
    expect(cfg, Algorithm::Bcafw)?;
    run(p, cfg, t0, &mut NoMonitor)
}

/// Block-coordinate pairwise Frank-Wolfe.
pub fn solve_bcpfw(p: &Problem, cfg: &SolverConfig, t0: &TransportPlan) -> Result<SolveResult> {
    expect(cfg, Algorithm::Bcpfw)?;
    run(p, cfg, t0, &mut NoMonitor)
}

fn expect(cfg: &SolverConfig, algorithm: Algorithm) -> Result<()> {
    if cfg.algorithm != algorithm {
        return Err(Error::config(format!(
            "solver for {algorithm:?} called with configuration {}",
            cfg.label()
        )));
    }
    Ok(())
}

/// Column sampler over the columns with positive mass.
struct Sampler {
    rule: Sampling,
    columns: Vec<usize>,
    pos: usize,
}

impl Sampler {
    fn new(rule: Sampling, columns: Vec<usize>) -> Self {
        let pos = columns.len();
        Sampler { rule, columns, pos }
    }

    #[inline]
    fn next(&mut self, rng: &mut ChaCha8Rng) -> usize {
        match self.rule {
            Sampling::Uniform => self.columns[rng.random_range(0..self.columns.len())],
            Sampling::Permutation => {
                if self.pos == self.columns.len() {
                    self.columns.shuffle(rng);
                    self.pos = 0;
                }
                let i = self.columns[self.pos];
                self.pos += 1;
                i
            }
        }
    }
}

/// Scratch state of one block update.
struct Block<'a> {
    p: &'a Problem,
    plan: &'a mut TransportPlan,
    cache: &'a mut RowSumCache,
    grad: &'a [f64],
    dir: &'a mut [f64],
    i: usize,
}

impl Block<'_> {
    /// Frank-Wolfe step toward `b_i·e_s`. Returns whether the column changed.
    fn fw_step(&mut self, gamma_rule: Option<f64>) -> bool {
        let b = self.p.target_marginal()[self.i];
        let s = argmin_index(self.grad);
        let col = self.plan.column(self.i);
        for (l, (d, &t)) in self.dir.iter_mut().zip(col).enumerate() {
            *d = if l == s { b - t } else { -t };
        }
        let ls = line_search_raw(self.p, self.cache.sums(), self.i, self.dir, 1.0);
        if ls.stalled {
            return false;
        }
        let gamma = gamma_rule.unwrap_or(ls.gamma);
        if gamma <= 0.0 {
            return false;
        }
        let mut moved = false;
        let col = self.plan.entries_mut().col_mut(self.i);
        for (l, t) in col.iter_mut().enumerate() {
            let target = if l == s { b } else { 0.0 };
            let new = if gamma >= 1.0 {
                target
            } else {
                (1.0 - gamma) * *t + gamma * target
            };
            if new != *t {
                moved = true;
                self.cache.add(l, new - *t);
                *t = new;
            }
        }
        moved
    }

    /// Away step from `b_i·e_v`: `t ← t + γ(t − b_i·e_v)`, `γ ≤ α_v/(1−α_v)`.
    fn away_step(&mut self, v: usize, gamma_max: f64) -> bool {
        let b = self.p.target_marginal()[self.i];
        let col = self.plan.column(self.i);
        for (l, (d, &t)) in self.dir.iter_mut().zip(col).enumerate() {
            *d = if l == v { t - b } else { t };
        }
        let ls = line_search_raw(self.p, self.cache.sums(), self.i, self.dir, gamma_max);
        if ls.stalled || ls.gamma <= 0.0 {
            return false;
        }
        let gamma = ls.gamma;
        let drop = gamma >= gamma_max;
        let col = self.plan.entries_mut().col_mut(self.i);
        let mut moved = false;
        for (l, t) in col.iter_mut().enumerate() {
            let new = if l == v {
                if drop {
                    0.0
                } else {
                    ((1.0 + gamma) * *t - gamma * b).max(0.0)
                }
            } else {
                (1.0 + gamma) * *t
            };
            if new != *t {
                moved = true;
                self.cache.add(l, new - *t);
                *t = new;
            }
        }
        moved
    }

    /// Pairwise step moving mass from row `v` to row `s`, `γ ≤ α_v`.
    fn pairwise_step(&mut self, s: usize, v: usize) -> bool {
        if s == v {
            return false;
        }
        let b = self.p.target_marginal()[self.i];
        let tv = self.plan.column(self.i)[v];
        let gamma_max = tv / b;
        self.dir.fill(0.0);
        self.dir[s] = b;
        self.dir[v] = -b;
        let ls = line_search_raw(self.p, self.cache.sums(), self.i, self.dir, gamma_max);
        if ls.stalled || ls.gamma <= 0.0 {
            return false;
        }
        let delta = if ls.gamma >= gamma_max {
            tv
        } else {
            (ls.gamma * b).min(tv)
        };
        let col = self.plan.entries_mut().col_mut(self.i);
        col[v] = if ls.gamma >= gamma_max {
            0.0
        } else {
            tv - delta
        };
        col[s] += delta;
        self.cache.add(v, -delta);
        self.cache.add(s, delta);
        delta > 0.0
    }
}

fn active_size(col: &[f64], tol: f64) -> usize {
    col.iter().filter(|&&t| t > tol).count()
}

pub(crate) fn run(
    p: &Problem,
    cfg: &SolverConfig,
    t0: &TransportPlan,
    monitor: &mut dyn Monitor,
) -> Result<SolveResult> {
    cfg.validate()?;
    if !cfg.algorithm.is_blockwise() {
        return Err(Error::config(format!(
            "block solver called with {}",
            cfg.label()
        )));
    }
    check_start(p, t0)?;

    let (m, n) = (p.m(), p.n());
    let active = p.active_columns();
    let mut plan = t0.clone();
    let mut cache = RowSumCache::new(&plan);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut sampler = Sampler::new(cfg.sampling, active.clone());
    let period = cfg.gap_period(n);
    let total = cfg.max_epochs.saturating_mul(n as u64);
    let mut grad = vec![0.0; m];
    let mut dir = vec![0.0; m];
    let mut rec = Recorder::new(monitor, n);

    // blocks hit by the current run of zero steps
    let mut stalled_blocks = vec![false; n];
    let mut stall_count = 0usize;

    let checkpoint =
        |plan: &TransportPlan, cache: &mut RowSumCache, grad: &mut [f64]| -> (f64, f64) {
            cache.rebuild(plan);
            let gap = duality_gap_blockwise(p, plan.entries(), cache.sums(), grad);
            let obj = objective_unchecked(p, plan.entries(), cache.sums());
            (obj, gap)
        };

    rec.snapshot(0, &plan);
    let (obj, gap) = checkpoint(&plan, &mut cache, &mut grad);
    rec.record(0, obj, Some(gap), &plan);
    let mut k: u64 = 0;

    let (termination, final_gap) = if gap <= cfg.gap_tolerance {
        (Termination::GapToleranceMet, gap)
    } else {
        loop {
            let i = sampler.next(&mut rng);
            fill_gradient(p, cache.sums(), i, &mut grad);
            let mut blk = Block {
                p,
                plan: &mut plan,
                cache: &mut cache,
                grad: &grad,
                dir: &mut dir,
                i,
            };
            let moved = match cfg.algorithm {
                Algorithm::Bcfw => {
                    let gamma = match cfg.stepsize {
                        StepRule::Decay => Some(decay_stepsize(k, n, true)),
                        StepRule::LineSearch => None,
                    };
                    blk.fw_step(gamma)
                }
                Algorithm::Bcafw => {
                    let b = p.target_marginal()[i];
                    let tol = blk.plan.support_tolerance(i);
                    let col = blk.plan.column(i);
                    let s = argmin_index(&grad);
                    match away_index(&grad, col, tol, cfg.away_rule) {
                        Some(v) if active_size(col, tol) > 1 && col[v] < b => {
                            let inner: f64 = col.iter().zip(&grad).map(|(t, g)| t * g).sum();
                            let fw_slope = b * grad[s] - inner;
                            let away_slope = inner - b * grad[v];
                            if away_slope < fw_slope {
                                let alpha = col[v] / b;
                                blk.away_step(v, alpha / (1.0 - alpha))
                            } else {
                                blk.fw_step(None)
                            }
                        }
                        _ => blk.fw_step(None),
                    }
                }
                Algorithm::Bcpfw => {
                    let tol = blk.plan.support_tolerance(i);
                    let s = argmin_index(&grad);
                    match away_index(&grad, blk.plan.column(i), tol, AwayRule::Argmax) {
                        Some(v) => blk.pairwise_step(s, v),
                        None => blk.fw_step(None),
                    }
                }
                Algorithm::Fw => unreachable!("checked above"),
            };
            k += 1;

            if moved {
                if stall_count > 0 {
                    stalled_blocks.fill(false);
                    stall_count = 0;
                }
            } else if !stalled_blocks[i] {
                stalled_blocks[i] = true;
                stall_count += 1;
            }
            if k.is_multiple_of(n as u64) {
                cache.rebuild(&plan);
            }
            rec.snapshot(k, &plan);

            let stall = stall_count >= active.len();
            if k.is_multiple_of(period) || stall || k >= total {
                let (obj, gap) = checkpoint(&plan, &mut cache, &mut grad);
                rec.record(k, obj, Some(gap), &plan);
                if gap <= cfg.gap_tolerance {
                    break (Termination::GapToleranceMet, gap);
                }
                if stall {
                    break (Termination::Stalled, gap);
                }
                if k >= total {
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
