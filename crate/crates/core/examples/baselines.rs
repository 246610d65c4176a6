// Projected gradient and FISTA on the same instance, plus the simplex
// projection they are built on.
//
//     cargo run --release --example baselines

use srot::baselines::{lipschitz_constant, solve_baseline, BaselineAlgorithm, BaselineConfig};
use srot::instance::synthetic_instance;
use srot::kernel::project_scaled_simplex;
use srot::solvers::default_initial_plan;

pub fn run_example() -> srot::Result<()> {
    let y = project_scaled_simplex(&[0.8, -0.3, 0.6, 0.1], 1.0)?;
    println!("projection of [0.8, -0.3, 0.6, 0.1] onto the unit simplex: {y:?}");

    let problem = synthetic_instance(20, 12, 0.5, 11)?;
    println!("L = n/λ = {}", lipschitz_constant(&problem));
    let t0 = default_initial_plan(&problem);
    for alg in [BaselineAlgorithm::Pgd, BaselineAlgorithm::Fista] {
        let cfg = BaselineConfig::new(alg)
            .with_max_iterations(20_000)
            .with_gap_tolerance(1e-9)
            .with_gap_check_period(1);
        let res = solve_baseline(&problem, &cfg, &t0)?;
        let at = |k: u64| {
            res.trace
                .iter()
                .find(|r| r.iteration == k)
                .map(|r| r.objective)
        };
        println!(
            "{:<6} {} after {:>6} iterations, f(10) = {:.8}, f* ≈ {:.10}, gap {:.2e}",
            cfg.label(),
            res.termination,
            res.iterations,
            at(10).unwrap_or(f64::NAN),
            res.final_objective(),
            res.final_gap
        );
    }
    Ok(())
}

fn main() -> srot::Result<()> {
    run_example()
}
