// Compare measured suboptimality of BCFW with the decaying stepsize against
// the worst-case bound (2n/(k+2n))·(4/λ + h0).
//
//     cargo run --release --example theorem_bound

use srot::baselines::{solve_baseline, BaselineAlgorithm, BaselineConfig};
use srot::instance::synthetic_instance;
use srot::kernel::objective;
use srot::solvers::{
    default_initial_plan, solve, theorem1_bound, theorem1_iterations, Algorithm, SolverConfig,
    StepRule,
};

pub fn run_example() -> srot::Result<()> {
    let (n, lambda) = (16, 1.0);
    let problem = synthetic_instance(16, n, lambda, 5)?;
    let t0 = default_initial_plan(&problem);

    let reference = BaselineConfig::new(BaselineAlgorithm::Fista)
        .with_max_iterations(100_000)
        .with_gap_tolerance(1e-11);
    let f_star = solve_baseline(&problem, &reference, &t0)?.final_objective();
    let h0 = objective(&problem, &t0)? - f_star;
    println!("f* = {f_star:.10}, h0 = {h0:.6}");

    let cfg = SolverConfig::new(Algorithm::Bcfw)
        .with_stepsize(StepRule::Decay)
        .with_max_epochs(256)
        .with_gap_check_period(1)
        .with_seed(2);
    let res = solve(&problem, &cfg, &t0)?;
    println!("{:>6} {:>14} {:>14}", "k", "f(T_k) - f*", "bound");
    for k in [16u64, 64, 256, 1024, 4096] {
        let rec = res
            .trace
            .iter()
            .find(|r| r.iteration == k)
            .expect("recorded every iteration");
        println!(
            "{k:>6} {:>14.4e} {:>14.4e}",
            rec.objective - f_star,
            theorem1_bound(n, k, lambda, h0)
        );
    }
    println!(
        "iterations guaranteed to reach ε = 1e-3: {}",
        theorem1_iterations(n, lambda, h0, 1e-3)
    );
    Ok(())
}

fn main() -> srot::Result<()> {
    run_example()
}
