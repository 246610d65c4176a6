use std::path::{Path, PathBuf};
use std::process::Command;

use srot::cli::{RunManifest, MANIFEST_FILE};
use srot::colortransfer::{write_png, RgbPixels};
use srot::kernel::io::{read_matrix, write_matrix, write_vector};
use srot::solvers::{parse_trace_csv, TRACE_HEADER};
use srot::Matrix;

fn srot(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_srot"))
        .args(args)
        .env("SROT_THREADS", "2")
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Instance {
    dir: tempfile::TempDir,
}

impl Instance {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let cost = Matrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]]).unwrap();
        write_matrix(dir.path().join("cost.csv"), &cost).unwrap();
        write_vector(dir.path().join("a.csv"), &[0.5, 0.5]).unwrap();
        write_vector(dir.path().join("b.csv"), &[0.2, 0.3, 0.5]).unwrap();
        write_vector(dir.path().join("a3.csv"), &[0.3, 0.3, 0.4]).unwrap();
        Instance { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn solve(&self, out: &str, extra: &[&str]) -> i32 {
        let (c, a, b, o) = (
            self.path("cost.csv"),
            self.path("a.csv"),
            self.path("b.csv"),
            self.path(out),
        );
        let mut args = vec![
            "solve",
            "--cost",
            s(&c),
            "--a",
            s(&a),
            "--b",
            s(&b),
            "--lambda",
            "1",
            "--out",
            s(&o),
        ];
        args.extend_from_slice(extra);
        srot(&args)
    }

    fn manifest(&self, out: &str) -> RunManifest {
        RunManifest::read(&self.path(out).join(MANIFEST_FILE)).unwrap()
    }
}

#[test]
fn solve_writes_plan_trace_and_manifest() {
    let inst = Instance::new();
    assert_eq!(
        inst.solve("ok", &["--algo", "bcpfw", "--gap-tol", "1e-10"]),
        0
    );
    let plan = read_matrix(inst.path("ok/plan.csv")).unwrap();
    assert_eq!(plan.shape(), (2, 3));
    for (got, want) in plan.col_sums().iter().zip([0.2, 0.3, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
    let trace = std::fs::read_to_string(inst.path("ok/trace.csv")).unwrap();
    assert!(trace.starts_with(TRACE_HEADER));
    assert!(
        parse_trace_csv(&trace)
            .unwrap()
            .last()
            .unwrap()
            .duality_gap
            .unwrap()
            <= 1e-10
    );
    let m = inst.manifest("ok");
    assert_eq!((m.status.as_str(), m.exit_code), ("ok", 0));
    assert_eq!(m.inputs.len(), 3);
    assert_eq!(m.outputs.len(), 2);
}

#[test]
fn exit_codes() {
    let inst = Instance::new();
    assert_eq!(inst.solve("fwp", &["--algo", "fw", "--sampling", "p"]), 3);
    assert_eq!(inst.manifest("fwp").exit_code, 3);
    assert_eq!(inst.solve("pgd", &["--algo", "pgd", "--step", "dec"]), 3);
    assert_eq!(inst.solve("dec", &["--algo", "bcpfw", "--step", "dec"]), 3);
    assert_eq!(inst.solve("unknown", &["--algo", "sgd"]), 3);
    assert_eq!(srot(&["solve", "--bogus"]), 3);
    assert_eq!(srot(&["--help"]), 0);

    let (c, a3, b) = (
        inst.path("cost.csv"),
        inst.path("a3.csv"),
        inst.path("b.csv"),
    );
    let out = inst.path("shape");
    let code = srot(&[
        "solve",
        "--cost",
        s(&c),
        "--a",
        s(&a3),
        "--b",
        s(&b),
        "--lambda",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 2);
    let m = inst.manifest("shape");
    assert_eq!(m.status, "failed");
    assert!(m.error.unwrap().contains("m = 2"));

    let missing = inst.path("nope.csv");
    let out = inst.path("missing");
    let code = srot(&[
        "solve",
        "--cost",
        s(&missing),
        "--a",
        s(&a3),
        "--b",
        s(&b),
        "--lambda",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 2);
    let (a, out) = (inst.path("a.csv"), inst.path("lambda"));
    let code = srot(&[
        "solve",
        "--cost",
        s(&c),
        "--a",
        s(&a),
        "--b",
        s(&b),
        "--lambda",
        "-1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn bench_writes_one_trace_per_algorithm_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let code = srot(&[
            "bench",
            "--m",
            "8",
            "--n",
            "6",
            "--seed",
            "3",
            "--lambda",
            "0.5",
            "--epochs",
            "30",
            "--algos",
            "fw-dec,fw-els,bcfw-u-els,bcfw-p-dec,bcafw,bcpfw,pgd,fista",
            "--out",
            s(&out),
        ]);
        assert_eq!(code, 0);
        out
    };
    let (a, b) = (run("a"), run("b"));
    let mut files: Vec<String> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files.len(), 8 + 2);
    assert!(files.contains(&"trace_bcfw-p-dec.csv".to_string()));
    let cmp = |p: &Path| std::fs::read_to_string(p.join("comparison.csv")).unwrap();
    assert_eq!(cmp(&a), cmp(&b));
    assert_eq!(
        cmp(&a).lines().next().unwrap().split(',').count(),
        1 + 3 * 8
    );

    let dup = dir.path().join("dup");
    assert_eq!(
        srot(&[
            "bench",
            "--m",
            "3",
            "--n",
            "3",
            "--lambda",
            "1",
            "--algos",
            "bcpfw,bcpfw",
            "--out",
            s(&dup)
        ]),
        3
    );
}

#[test]
fn replay_reproduces_a_run() {
    let inst = Instance::new();
    assert_eq!(
        inst.solve("first", &["--algo", "bcfw", "--epochs", "7", "--seed", "9"]),
        0
    );
    let again = inst.path("again");
    let manifest = inst.path("first").join(MANIFEST_FILE);
    assert_eq!(srot(&["replay", s(&manifest), "--out", s(&again)]), 0);
    assert_eq!(
        std::fs::read_to_string(inst.path("first/plan.csv")).unwrap(),
        std::fs::read_to_string(again.join("plan.csv")).unwrap()
    );
}

fn stripes(w: u32, h: u32, palette: &[[f64; 3]]) -> RgbPixels {
    let pixels = (0..w * h)
        .map(|idx| palette[(idx % w) as usize * palette.len() / w as usize])
        .collect();
    RgbPixels::new(w, h, pixels).unwrap()
}

#[test]
fn color_transfer_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src.png");
    let refp = dir.path().join("ref.png");
    write_png(
        &src,
        &stripes(
            16,
            4,
            &[
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 1.0, 0.0],
            ],
        ),
    )
    .unwrap();
    write_png(
        &refp,
        &stripes(8, 8, &[[0.2, 0.2, 0.2], [0.8, 0.8, 0.8], [0.5, 0.1, 0.9]]),
    )
    .unwrap();
    let out = dir.path().join("out");
    let code = srot(&[
        "color-transfer",
        "--source",
        s(&src),
        "--reference",
        s(&refp),
        "--k",
        "3",
        "--lambda",
        "0.1",
        "--algo",
        "bcpfw",
        "--epochs",
        "50",
        "--snapshots",
        "0,4,99999",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    for f in [
        "source_quantized.png",
        "reference_quantized.png",
        "recolored_k0.png",
        "heatmap_k4.png",
        "plan_k4.csv",
        "recolored.png",
        "heatmap.png",
        "plan.csv",
        "trace.csv",
        MANIFEST_FILE,
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("recolored_k99999.png").exists());

    let none = dir.path().join("none");
    let code = srot(&[
        "color-transfer",
        "--source",
        s(&src),
        "--reference",
        s(&refp),
        "--k",
        "2",
        "--lambda",
        "1",
        "--snapshots",
        "0",
        "--out",
        s(&none),
    ]);
    assert_eq!(code, 0);
    assert!(none.join("recolored_k0.png").exists());

    let bad = dir.path().join("bad");
    let code = srot(&[
        "color-transfer",
        "--source",
        s(&dir.path().join("x.png")),
        "--reference",
        s(&refp),
        "--lambda",
        "1",
        "--out",
        s(&bad),
    ]);
    assert_eq!(code, 2);
}
