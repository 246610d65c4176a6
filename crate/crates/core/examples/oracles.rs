// The building blocks: objective, block gradient, LMO, away oracle,
// duality gap, and exact line search on a small instance.
//
//     cargo run --example oracles

use srot::kernel::{
    away_oracle_block, duality_gap, gradient_block, lmo_block, lmo_full, objective, RowSumCache,
    TransportPlan,
};
use srot::solvers::exact_line_search;
use srot::{Matrix, Problem};

pub fn run_example() -> srot::Result<()> {
    let cost = Matrix::from_rows(&[
        vec![0.0, 1.0, 2.0],
        vec![1.0, 0.0, 1.0],
        vec![2.0, 1.0, 0.0],
    ])?;
    let problem = Problem::new(cost, vec![1.0 / 3.0; 3], vec![0.2, 0.3, 0.5], 1.0)?;
    let plan = TransportPlan::for_problem(
        &problem,
        Matrix::from_rows(&[
            vec![0.1, 0.3, 0.0],
            vec![0.1, 0.0, 0.25],
            vec![0.0, 0.0, 0.25],
        ])?,
    )?;
    let cache = RowSumCache::new(&plan);

    println!("f(T) = {:.6}", objective(&problem, &plan)?);
    let s = lmo_full(&problem, &plan)?;
    println!("gap  = {:.6}", duality_gap(&problem, &plan, &s)?);

    for i in 0..problem.n() {
        let g = gradient_block(&problem, &cache, i)?;
        let b = problem.target_marginal()[i];
        let vertex = lmo_block(&g, b)?;
        let (away, _) = away_oracle_block(&g, plan.column(i), b)?;
        let d: Vec<f64> = vertex
            .iter()
            .zip(plan.column(i))
            .map(|(s, t)| s - t)
            .collect();
        let ls = exact_line_search(&problem, &cache, i, &d, 1.0)?;
        println!(
            "column {i}: gradient {:?}, LMO vertex {:?}, away row {away}, line-search γ = {:.4}",
            g.values
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>(),
            vertex,
            ls.gamma
        );
    }
    Ok(())
}

fn main() -> srot::Result<()> {
    run_example()
}
