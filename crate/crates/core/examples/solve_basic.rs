// Solve a hand-written 3x2 instance with block-coordinate Frank-Wolfe and
// print the plan, its marginals, and the final duality gap.
//
//     cargo run --example solve_basic

use srot::solvers::{default_initial_plan, solve, Algorithm, SolverConfig};
use srot::{Matrix, Problem};

pub fn run_example() -> srot::Result<()> {
    let cost = Matrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]])?;
    let a = vec![0.2, 0.3, 0.5];
    let b = vec![0.4, 0.6];
    let problem = Problem::new(cost, a, b, 0.05)?;

    let cfg = SolverConfig::new(Algorithm::Bcfw)
        .with_max_epochs(2000)
        .with_gap_tolerance(1e-10)
        .with_seed(1);
    let result = solve(&problem, &cfg, &default_initial_plan(&problem))?;

    println!(
        "{} after {} iterations",
        result.termination, result.iterations
    );
    println!("objective  {:.10}", result.final_objective());
    println!("gap        {:.3e}", result.final_gap);
    println!("plan (rows = source bins, columns = target bins):");
    for j in 0..problem.m() {
        println!("  {:?}", result.plan.entries().row(j));
    }
    println!("T·1  = {:?}", result.plan.entries().row_sums());
    println!("a    = {:?}", problem.source_marginal());
    println!("Tᵀ1  = {:?}", result.plan.entries().col_sums());
    assert!(result.final_gap <= 1e-10);
    Ok(())
}

fn main() -> srot::Result<()> {
    run_example()
}
