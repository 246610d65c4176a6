// Write an instance to CSV and binary files, drive the `solve` subcommand
// through the library entry point, and read the outputs back.
//
//     cargo run --example cli_roundtrip [out_dir]

use std::path::{Path, PathBuf};

use srot::cli::{self, RunManifest, MANIFEST_FILE};
use srot::instance::synthetic_instance;
use srot::kernel::io::{read_matrix, write_matrix, write_vector};
use srot::solvers::parse_trace_csv;

pub fn run_example(dir: &Path) -> srot::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| srot::Error::io(dir, e))?;
    let problem = synthetic_instance(6, 4, 1.0, 8)?;
    write_matrix(dir.join("cost.bin"), problem.cost())?;
    write_vector(dir.join("a.csv"), problem.source_marginal())?;
    write_vector(dir.join("b.csv"), problem.target_marginal())?;

    let out = dir.join("run");
    let arg = |p: PathBuf| p.display().to_string();
    let argv = vec![
        "srot".to_string(),
        "solve".into(),
        "--cost".into(),
        arg(dir.join("cost.bin")),
        "--a".into(),
        arg(dir.join("a.csv")),
        "--b".into(),
        arg(dir.join("b.csv")),
        "--lambda".into(),
        "1".into(),
        "--algo".into(),
        "bcafw".into(),
        "--gap-tol".into(),
        "1e-10".into(),
        "--out".into(),
        arg(out.clone()),
    ];
    let code = cli::run(argv);
    println!("exit status {code}");

    let plan = read_matrix(out.join("plan.csv"))?;
    let trace_path = out.join("trace.csv");
    let trace_text =
        std::fs::read_to_string(&trace_path).map_err(|e| srot::Error::io(&trace_path, e))?;
    let trace = parse_trace_csv(&trace_text).map_err(srot::Error::Input)?;
    let manifest = RunManifest::read(&out.join(MANIFEST_FILE))?;
    println!(
        "plan {}x{}, {} trace records, status {}",
        plan.rows(),
        plan.cols(),
        trace.len(),
        manifest.status
    );
    for input in &manifest.inputs {
        println!("  {} sha256 {}", input.path, &input.sha256[..16]);
    }
    assert_eq!(code, 0);
    Ok(())
}

fn main() -> srot::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("srot-cli-roundtrip"));
    run_example(&dir)
}
