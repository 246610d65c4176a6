// Run every Frank-Wolfe variant from the same starting plan on a random
// instance and report iterations, epochs, and sparsity at a common gap.
//
//     cargo run --release --example compare_variants

use srot::instance::synthetic_instance;
use srot::solvers::{default_initial_plan, solve, Algorithm, Sampling, SolverConfig, StepRule};

pub fn run_example() -> srot::Result<()> {
    let problem = synthetic_instance(32, 32, 0.05, 3)?;
    let t0 = default_initial_plan(&problem);
    let target = 1e-4;
    let variants = [
        SolverConfig::new(Algorithm::Fw).with_stepsize(StepRule::Decay),
        SolverConfig::new(Algorithm::Fw),
        SolverConfig::new(Algorithm::Bcfw).with_stepsize(StepRule::Decay),
        SolverConfig::new(Algorithm::Bcfw),
        SolverConfig::new(Algorithm::Bcfw).with_sampling(Sampling::Permutation),
        SolverConfig::new(Algorithm::Bcafw),
        SolverConfig::new(Algorithm::Bcpfw),
    ];
    println!(
        "{:<12} {:>12} {:>10} {:>10} {:>14}",
        "variant", "iterations", "epochs", "sparsity", "objective"
    );
    for cfg in variants {
        let cfg = cfg
            .with_max_epochs(5000)
            .with_gap_tolerance(target)
            .with_seed(7);
        let res = solve(&problem, &cfg, &t0)?;
        let epochs = res
            .epochs_to_gap(target)
            .map_or("-".to_string(), |e| format!("{e:.0}"));
        let iters = res
            .iterations_to_gap(target)
            .map_or("-".to_string(), |k| k.to_string());
        println!(
            "{:<12} {:>12} {:>10} {:>10.4} {:>14.8}",
            cfg.label(),
            iters,
            epochs,
            res.plan.sparsity(),
            res.final_objective()
        );
    }
    Ok(())
}

fn main() -> srot::Result<()> {
    run_example()
}
