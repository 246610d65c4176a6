//! Command-line workflows: `solve`, `bench`, `color-transfer`, and `replay`.
//!
//! Exit status: 0 on success, 1 on output I/O failure, 2 on bad input data
//! (unreadable or inconsistent files), 3 on invalid flags or configuration.

mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::baselines::{solve_baseline, BaselineAlgorithm, BaselineConfig};
use crate::colortransfer::{self, TransferConfig, TransferSolver};
use crate::error::{Error, Result};
use crate::instance::synthetic_instance;
use crate::kernel::io::{read_matrix, read_vector, write_matrix};
use crate::kernel::{AwayRule, Problem, TransportPlan};
use crate::solvers::{
    self, default_initial_plan, write_trace_csv, Algorithm, Sampling, SolveResult, SolverConfig,
    StepRule, TraceRecord,
};

pub use manifest::{sha256_hex, InputDigest, RunManifest, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Environment variable capping the number of `bench` worker threads.
pub const THREADS_ENV: &str = "SROT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "srot",
    version,
    about = "Frank-Wolfe solvers for semi-relaxed optimal transport"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance read from files.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Run several algorithms from the same initial plan and compare traces.
    #[command(allow_negative_numbers = true)]
    Bench(BenchArgs),
    /// Recolour a source image with the palette of a reference image.
    #[command(allow_negative_numbers = true)]
    ColorTransfer(ColorTransferArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Fw,
    Bcfw,
    Bcafw,
    Bcpfw,
    Pgd,
    Fista,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepArg {
    Dec,
    Els,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    U,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AwayArg {
    Argmax,
    Argmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanFormat {
    Csv,
    Bin,
}

impl PlanFormat {
    fn file_name(self, stem: &str) -> String {
        match self {
            PlanFormat::Csv => format!("{stem}.csv"),
            PlanFormat::Bin => format!("{stem}.bin"),
        }
    }
}

/// Solver selection flags shared by `solve` and `color-transfer`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "bcfw")]
    pub algo: AlgoArg,
    /// Stepsize rule for Frank-Wolfe methods [default: els].
    #[arg(long, value_enum)]
    pub step: Option<StepArg>,
    /// Column sampling for bcfw [default: u].
    #[arg(long, value_enum)]
    pub sampling: Option<SamplingArg>,
    /// Away atom selection for bcafw [default: argmax].
    #[arg(long = "away-oracle", value_enum)]
    pub away_oracle: Option<AwayArg>,
    /// Epochs (n block updates, or one full iteration).
    #[arg(long, default_value_t = 1000)]
    pub epochs: u64,
    /// Stop once the duality gap is at most this value.
    #[arg(long = "gap-tol", default_value_t = 0.0)]
    pub gap_tol: f64,
    /// Iterations between gap checks [default: n].
    #[arg(long = "gap-period")]
    pub gap_period: Option<u64>,
    /// Solver RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub cost: PathBuf,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Plan output format.
    #[arg(long = "plan-format", value_enum, default_value = "csv")]
    pub plan_format: PlanFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated algorithm labels, e.g. fw-dec,bcfw-u-els,bcpfw,fista.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "fw-dec,fw-els,bcfw-u-dec,bcfw-u-els"
    )]
    pub algos: Vec<String>,
    #[arg(long)]
    pub cost: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Rows of a synthetic instance.
    #[arg(long)]
    pub m: Option<usize>,
    /// Columns of a synthetic instance.
    #[arg(long)]
    pub n: Option<usize>,
    /// Synthetic instance seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: u64,
    #[arg(long = "gap-tol", default_value_t = 0.0)]
    pub gap_tol: f64,
    /// Solver RNG seed shared by all block methods.
    #[arg(long = "run-seed", default_value_t = 0)]
    pub run_seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ColorTransferArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// Palette size of both images.
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    /// Reference palette size [default: k].
    #[arg(long = "k-reference")]
    pub k_reference: Option<usize>,
    #[arg(long)]
    pub lambda: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "kmeans-seed", default_value_t = 0)]
    pub kmeans_seed: u64,
    #[arg(long = "kmeans-iters", default_value_t = 100)]
    pub kmeans_iters: usize,
    /// Iterations at which to write recoloured images and heat maps.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Output directory overriding the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A resolved solver: a Frank-Wolfe variant or a gradient baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    FrankWolfe(SolverConfig),
    Baseline(BaselineConfig),
}

impl SolverChoice {
    pub fn label(&self) -> String {
        match self {
            SolverChoice::FrankWolfe(c) => c.label(),
            SolverChoice::Baseline(c) => c.label().to_string(),
        }
    }

    pub fn solve(&self, p: &Problem, t0: &TransportPlan) -> Result<SolveResult> {
        match self {
            SolverChoice::FrankWolfe(c) => solvers::solve(p, c, t0),
            SolverChoice::Baseline(c) => solve_baseline(p, c, t0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SolverChoice::FrankWolfe(c) => c.validate(),
            SolverChoice::Baseline(c) => c.validate(),
        }
    }

    /// Parses a benchmark label such as `fw-dec`, `bcfw-p-els`, `bcafw`, `pgd`.
    pub fn from_label(label: &str, epochs: u64, gap_tol: f64, seed: u64) -> Result<Self> {
        let fw = |alg, step, sampling| {
            SolverChoice::FrankWolfe(
                SolverConfig::new(alg)
                    .with_stepsize(step)
                    .with_sampling(sampling)
                    .with_max_epochs(epochs)
                    .with_gap_tolerance(gap_tol)
                    .with_seed(seed),
            )
        };
        let base = |alg| {
            SolverChoice::Baseline(
                BaselineConfig::new(alg)
                    .with_max_iterations(epochs)
                    .with_gap_tolerance(gap_tol),
            )
        };
        use Sampling::*;
        use StepRule::*;
        let choice = match label.trim() {
            "fw-dec" => fw(Algorithm::Fw, Decay, Uniform),
            "fw-els" => fw(Algorithm::Fw, LineSearch, Uniform),
            "bcfw-u-dec" => fw(Algorithm::Bcfw, Decay, Uniform),
            "bcfw-u-els" => fw(Algorithm::Bcfw, LineSearch, Uniform),
            "bcfw-p-dec" => fw(Algorithm::Bcfw, Decay, Permutation),
            "bcfw-p-els" => fw(Algorithm::Bcfw, LineSearch, Permutation),
            "bcafw" => fw(Algorithm::Bcafw, LineSearch, Uniform),
            "bcpfw" => fw(Algorithm::Bcpfw, LineSearch, Uniform),
            "pgd" => base(BaselineAlgorithm::Pgd),
            "fista" => base(BaselineAlgorithm::Fista),
            other => return Err(Error::config(format!("unknown algorithm label {other:?}"))),
        };
        choice.validate()?;
        Ok(choice)
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            SolverChoice::FrankWolfe(c) => json!({
                "label": c.label(),
                "algorithm": format!("{:?}", c.algorithm),
                "sampling": format!("{:?}", c.sampling),
                "stepsize": format!("{:?}", c.stepsize),
                "away_rule": format!("{:?}", c.away_rule),
                "max_epochs": c.max_epochs,
                "gap_tolerance": c.gap_tolerance,
                "gap_check_period": c.gap_check_period,
                "rng_seed": c.rng_seed,
            }),
            SolverChoice::Baseline(c) => json!({
                "label": c.label(),
                "max_iterations": c.max_iterations,
                "gap_tolerance": c.gap_tolerance,
                "gap_check_period": c.gap_check_period,
                "step_length": c.step_length,
            }),
        }
    }
}

/// Resolves `--algo/--step/--sampling/--away-oracle` and friends.
pub fn resolve_solver(args: &SolverArgs) -> Result<SolverChoice> {
    let baseline = match args.algo {
        AlgoArg::Pgd => Some(BaselineAlgorithm::Pgd),
        AlgoArg::Fista => Some(BaselineAlgorithm::Fista),
        _ => None,
    };
    if let Some(alg) = baseline {
        if args.step.is_some() || args.sampling.is_some() || args.away_oracle.is_some() {
            return Err(Error::config(
                "--step, --sampling and --away-oracle do not apply to pgd/fista",
            ));
        }
        let mut cfg = BaselineConfig::new(alg)
            .with_max_iterations(args.epochs)
            .with_gap_tolerance(args.gap_tol);
        cfg.gap_check_period = args.gap_period;
        let choice = SolverChoice::Baseline(cfg);
        choice.validate()?;
        return Ok(choice);
    }
    let algorithm = match args.algo {
        AlgoArg::Fw => Algorithm::Fw,
        AlgoArg::Bcfw => Algorithm::Bcfw,
        AlgoArg::Bcafw => Algorithm::Bcafw,
        AlgoArg::Bcpfw => Algorithm::Bcpfw,
        AlgoArg::Pgd | AlgoArg::Fista => unreachable!(),
    };
    if args.away_oracle.is_some() && algorithm != Algorithm::Bcafw {
        return Err(Error::config("--away-oracle applies to bcafw only"));
    }
    let mut cfg = SolverConfig::new(algorithm)
        .with_max_epochs(args.epochs)
        .with_gap_tolerance(args.gap_tol)
        .with_seed(args.seed);
    cfg.gap_check_period = args.gap_period;
    if let Some(step) = args.step {
        cfg.stepsize = match step {
            StepArg::Dec => StepRule::Decay,
            StepArg::Els => StepRule::LineSearch,
        };
    }
    if let Some(sampling) = args.sampling {
        cfg.sampling = match sampling {
            SamplingArg::U => Sampling::Uniform,
            SamplingArg::P => Sampling::Permutation,
        };
    }
    if let Some(away) = args.away_oracle {
        cfg.away_rule = match away {
            AwayArg::Argmax => AwayRule::Argmax,
            AwayArg::Argmin => AwayRule::Argmin,
        };
    }
    cfg.validate()?;
    Ok(SolverChoice::FrankWolfe(cfg))
}

/// Parses `argv` (including the program name), runs the command, and returns
/// the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, &argv),
        Command::Bench(args) => cmd_bench(&args, &argv),
        Command::ColorTransfer(args) => cmd_color_transfer(&args, &argv),
        Command::Replay(args) => cmd_replay(&args),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Instance(_) | Error::Input(_) => EXIT_INPUT,
        Error::Config(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Image { .. } => EXIT_IO,
    }
}

/// Runs `body` with a manifest that is written to `out` whatever the outcome.
fn with_manifest(
    command: &str,
    argv: &[String],
    out: &Path,
    body: impl FnOnce(&mut RunManifest) -> Result<()>,
) -> i32 {
    let mut manifest = RunManifest::begin(command, argv);
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!(
            "error: cannot create output directory {}: {e}",
            out.display()
        );
        return EXIT_IO;
    }
    let (code, message) = match body(&mut manifest) {
        Ok(()) => (EXIT_OK, None),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code(&e), Some(e.to_string()))
        }
    };
    manifest.finish(code, message);
    match manifest.write(out) {
        Ok(_) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if code == EXIT_OK {
                EXIT_IO
            } else {
                code
            }
        }
    }
}

fn load_problem(
    manifest: &mut RunManifest,
    cost: &Path,
    a: &Path,
    b: &Path,
    lambda: f64,
) -> Result<Problem> {
    let as_input = |e: Error| match e {
        Error::Io { path, source } => Error::input(format!("cannot read {path}: {source}")),
        other => other,
    };
    for path in [cost, a, b] {
        manifest.add_input(path)?;
    }
    let cost = read_matrix(cost).map_err(as_input)?;
    let a = read_vector(a).map_err(as_input)?;
    let b = read_vector(b).map_err(as_input)?;
    Problem::new(cost, a, b, lambda)
}

fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace).expect("writing to a Vec cannot fail");
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn summary_line(label: &str, res: &SolveResult) -> String {
    format!(
        "{label}: {} after {} iterations, objective {:.12e}, gap {:.3e}, sparsity {:.4}",
        res.termination,
        res.iterations,
        res.final_objective(),
        res.final_gap,
        res.plan.sparsity()
    )
}

pub fn cmd_solve(args: &SolveArgs, argv: &[String]) -> i32 {
    with_manifest("solve", argv, &args.out, |manifest| {
        let choice = resolve_solver(&args.solver)?;
        manifest.config = json!({
            "lambda": args.lambda,
            "solver": choice.describe(),
            "plan_format": format!("{:?}", args.plan_format),
            "initial_plan": "first row set to b",
        });
        let problem = load_problem(manifest, &args.cost, &args.a, &args.b, args.lambda)?;
        let t0 = default_initial_plan(&problem);
        let res = choice.solve(&problem, &t0)?;

        let plan_path = args.out.join(args.plan_format.file_name("plan"));
        write_matrix(&plan_path, res.plan.entries())?;
        manifest.add_output(&plan_path);
        let trace_path = args.out.join("trace.csv");
        write_trace(&trace_path, &res.trace)?;
        manifest.add_output(&trace_path);
        manifest.config["termination"] = json!(res.termination.to_string());
        println!("{}", summary_line(&choice.label(), &res));
        Ok(())
    })
}

fn bench_threads(jobs: usize) -> Result<usize> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| {
                Error::config(format!("{THREADS_ENV}={v:?} is not a positive integer"))
            })?,
        Err(_) => available,
    };
    Ok(cap.min(jobs).max(1))
}

/// Runs every choice on `problem` from `t0`, in parallel over at most
/// `threads` workers. Results are returned in input order.
pub fn run_all(
    problem: &Problem,
    t0: &TransportPlan,
    choices: &[SolverChoice],
    threads: usize,
) -> Vec<Result<SolveResult>> {
    let slots: Vec<Mutex<Option<Result<SolveResult>>>> =
        choices.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= choices.len() {
                    break;
                }
                let res = choices[idx].solve(problem, t0);
                *slots[idx].lock().unwrap() = Some(res);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every job ran"))
        .collect()
}

/// Wide comparison table keyed by epoch: one objective, gap and sparsity
/// column per algorithm, empty where an algorithm has no record.
pub fn comparison_csv(labels: &[String], traces: &[&[TraceRecord]]) -> String {
    // nonnegative finite f64 order like their bit patterns
    let mut rows: BTreeMap<u64, Vec<Option<&TraceRecord>>> = BTreeMap::new();
    for (k, trace) in traces.iter().enumerate() {
        for r in trace.iter() {
            let slot = rows
                .entry(r.epoch.to_bits())
                .or_insert_with(|| vec![None; traces.len()]);
            slot[k] = Some(r);
        }
    }
    let mut out = String::from("epoch");
    for l in labels {
        out += &format!(",{l}_objective,{l}_duality_gap,{l}_sparsity");
    }
    out.push('\n');
    for (epoch, cells) in rows {
        out += &f64::from_bits(epoch).to_string();
        for cell in cells {
            match cell {
                Some(r) => {
                    let gap = r.duality_gap.map(|g| g.to_string()).unwrap_or_default();
                    out += &format!(",{},{},{}", r.objective, gap, r.sparsity);
                }
                None => out += ",,,",
            }
        }
        out.push('\n');
    }
    out
}

pub fn cmd_bench(args: &BenchArgs, argv: &[String]) -> i32 {
    with_manifest("bench", argv, &args.out, |manifest| {
        let choices = args
            .algos
            .iter()
            .map(|l| SolverChoice::from_label(l, args.epochs, args.gap_tol, args.run_seed))
            .collect::<Result<Vec<_>>>()?;
        if choices.is_empty() {
            return Err(Error::config("--algos is empty"));
        }
        let labels: Vec<String> = choices.iter().map(SolverChoice::label).collect();
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::config(format!("algorithm {l} listed twice")));
            }
        }
        let files = [&args.cost, &args.a, &args.b];
        let synthetic = args.m.is_some() || args.n.is_some();
        let n_files = files.iter().filter(|f| f.is_some()).count();
        if synthetic && n_files > 0 {
            return Err(Error::config(
                "give either --cost/--a/--b or --m/--n, not both",
            ));
        }
        if n_files != 0 && n_files != 3 {
            return Err(Error::config("--cost, --a and --b must be given together"));
        }
        if n_files == 0 && (args.m.is_none() || args.n.is_none()) {
            return Err(Error::config("synthetic instances need both --m and --n"));
        }
        let threads = bench_threads(choices.len())?;
        manifest.config = json!({
            "lambda": args.lambda,
            "epochs": args.epochs,
            "gap_tolerance": args.gap_tol,
            "run_seed": args.run_seed,
            "instance": if synthetic {
                json!({"generator": "uniform cost, normalised uniform marginals", "m": args.m, "n": args.n, "seed": args.seed})
            } else {
                json!("files")
            },
            "solvers": choices.iter().map(SolverChoice::describe).collect::<Vec<_>>(),
            "threads": threads,
        });

        let problem = match (&args.cost, &args.a, &args.b) {
            (Some(c), Some(a), Some(b)) => load_problem(manifest, c, a, b, args.lambda)?,
            _ => synthetic_instance(args.m.unwrap(), args.n.unwrap(), args.lambda, args.seed)?,
        };
        let t0 = default_initial_plan(&problem);
        let results = run_all(&problem, &t0, &choices, threads)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        for (label, res) in labels.iter().zip(&results) {
            let path = args.out.join(format!("trace_{label}.csv"));
            write_trace(&path, &res.trace)?;
            manifest.add_output(&path);
            println!("{}", summary_line(label, res));
        }
        let traces: Vec<&[TraceRecord]> = results.iter().map(|r| r.trace.as_slice()).collect();
        let path = args.out.join("comparison.csv");
        fs::write(&path, comparison_csv(&labels, &traces)).map_err(|e| Error::io(&path, e))?;
        manifest.add_output(&path);
        Ok(())
    })
}

pub fn cmd_color_transfer(args: &ColorTransferArgs, argv: &[String]) -> i32 {
    with_manifest("color-transfer", argv, &args.out, |manifest| {
        let choice = resolve_solver(&args.solver)?;
        if args.k == 0 || args.k_reference == Some(0) {
            return Err(Error::config("palette sizes must be at least 1"));
        }
        let solver = match &choice {
            SolverChoice::FrankWolfe(c) => TransferSolver::FrankWolfe(c.clone()),
            SolverChoice::Baseline(c) => TransferSolver::Baseline(c.clone()),
        };
        let cfg = TransferConfig {
            k_source: args.k,
            k_reference: args.k_reference.unwrap_or(args.k),
            lambda: args.lambda,
            solver,
            kmeans_seed: args.kmeans_seed,
            kmeans_max_iters: args.kmeans_iters,
            snapshot_iterations: args.snapshots.clone(),
        };
        cfg.validate()?;
        manifest.config = json!({
            "k_source": cfg.k_source,
            "k_reference": cfg.k_reference,
            "lambda": cfg.lambda,
            "solver": choice.describe(),
            "kmeans_seed": cfg.kmeans_seed,
            "kmeans_max_iters": cfg.kmeans_max_iters,
            "snapshots": cfg.snapshot_iterations,
        });
        let read =
            |path: &Path| colortransfer::read_png(path).map_err(|e| Error::input(e.to_string()));
        manifest.add_input(&args.source)?;
        manifest.add_input(&args.reference)?;
        let source = read(&args.source)?;
        let reference = read(&args.reference)?;
        let out = colortransfer::transfer(&source, &reference, &cfg)?;

        let save_rgb =
            |name: String, img: &colortransfer::RgbPixels, m: &mut RunManifest| -> Result<()> {
                let path = args.out.join(name);
                colortransfer::write_png(&path, img)?;
                m.add_output(&path);
                Ok(())
            };
        save_rgb(
            "source_quantized.png".into(),
            &out.source_model.quantized(source.width, source.height)?,
            manifest,
        )?;
        save_rgb(
            "reference_quantized.png".into(),
            &out.reference_model
                .quantized(reference.width, reference.height)?,
            manifest,
        )?;
        for snap in &out.snapshots {
            save_rgb(
                format!("recolored_k{}.png", snap.iteration),
                &snap.recolored,
                manifest,
            )?;
            let heat = args.out.join(format!("heatmap_k{}.png", snap.iteration));
            colortransfer::write_gray_png(&heat, &snap.heatmap)?;
            manifest.add_output(&heat);
            let plan = args.out.join(format!("plan_k{}.csv", snap.iteration));
            write_matrix(&plan, snap.plan.entries())?;
            manifest.add_output(&plan);
        }
        for &k in &cfg.snapshot_iterations {
            if !out.snapshots.iter().any(|s| s.iteration == k) {
                log::warn!(
                    "snapshot at iteration {k} not reached; run stopped at {}",
                    out.result.iterations
                );
            }
        }
        save_rgb("recolored.png".into(), &out.recolored, manifest)?;
        let heat = args.out.join("heatmap.png");
        colortransfer::write_gray_png(&heat, &out.heatmap)?;
        manifest.add_output(&heat);
        let plan = args.out.join("plan.csv");
        write_matrix(&plan, out.result.plan.entries())?;
        manifest.add_output(&plan);
        let trace = args.out.join("trace.csv");
        write_trace(&trace, &out.result.trace)?;
        manifest.add_output(&trace);
        manifest.config["termination"] = json!(out.result.termination.to_string());
        println!("{}", summary_line(&choice.label(), &out.result));
        Ok(())
    })
}

/// Re-runs the argument vector stored in a manifest, optionally redirecting
/// `--out`.
pub fn cmd_replay(args: &ReplayArgs) -> i32 {
    let manifest = match RunManifest::read(&args.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut argv = manifest.args.clone();
    if argv.get(1).map(String::as_str) == Some("replay") {
        eprintln!("error: refusing to replay a replay manifest");
        return EXIT_CONFIG;
    }
    if let Some(out) = &args.out {
        let out = out.display().to_string();
        match argv.iter().position(|a| a == "--out") {
            Some(k) if k + 1 < argv.len() => argv[k + 1] = out,
            _ => {
                if let Some(k) = argv.iter().position(|a| a.starts_with("--out=")) {
                    argv[k] = format!("--out={out}");
                } else {
                    argv.extend(["--out".to_string(), out]);
                }
            }
        }
    }
    run(argv)
}
