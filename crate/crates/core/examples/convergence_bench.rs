// Benchmark several solvers on one instance in parallel and write per-solver
// traces plus a wide comparison table, the same files `srot bench` produces.
//
//     cargo run --release --example convergence_bench [out_dir]

use std::fs;
use std::path::{Path, PathBuf};

use srot::cli::{comparison_csv, run_all, SolverChoice};
use srot::instance::synthetic_instance;
use srot::solvers::{default_initial_plan, write_trace_csv};

pub fn run_example(out: &Path) -> srot::Result<()> {
    let problem = synthetic_instance(48, 48, 0.01, 21)?;
    let t0 = default_initial_plan(&problem);
    let labels = [
        "fw-dec",
        "fw-els",
        "bcfw-u-els",
        "bcfw-p-els",
        "bcafw",
        "bcpfw",
        "fista",
    ];
    let choices = labels
        .iter()
        .map(|l| SolverChoice::from_label(l, 300, 0.0, 4))
        .collect::<srot::Result<Vec<_>>>()?;
    let results = run_all(&problem, &t0, &choices, 4)
        .into_iter()
        .collect::<srot::Result<Vec<_>>>()?;

    fs::create_dir_all(out).map_err(|e| srot::Error::io(out, e))?;
    for (label, res) in labels.iter().zip(&results) {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &res.trace).expect("in-memory write");
        let path = out.join(format!("trace_{label}.csv"));
        fs::write(&path, buf).map_err(|e| srot::Error::io(&path, e))?;
        println!(
            "{label:<11} final gap {:.3e}  sparsity {:.3}",
            res.final_gap,
            res.plan.sparsity()
        );
    }
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let traces: Vec<_> = results.iter().map(|r| r.trace.as_slice()).collect();
    let path = out.join("comparison.csv");
    fs::write(&path, comparison_csv(&labels, &traces)).map_err(|e| srot::Error::io(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> srot::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("srot-bench"));
    run_example(&out)
}
