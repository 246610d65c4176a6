// Recolour a synthetic gradient image with the palette of a second one and
// write the quantised inputs, intermediate snapshots, and the result.
//
//     cargo run --release --example color_transfer [out_dir]

use std::path::{Path, PathBuf};

use srot::colortransfer::{transfer, write_gray_png, write_png, RgbPixels, TransferConfig};
use srot::solvers::{Algorithm, SolverConfig};

fn gradient(width: u32, height: u32, f: impl Fn(f64, f64) -> [f64; 3]) -> srot::Result<RgbPixels> {
    let pixels = (0..width * height)
        .map(|idx| {
            let x = (idx % width) as f64 / (width - 1) as f64;
            let y = (idx / width) as f64 / (height - 1) as f64;
            f(x, y)
        })
        .collect();
    RgbPixels::new(width, height, pixels)
}

pub fn run_example(out: &Path) -> srot::Result<()> {
    let source = gradient(64, 48, |x, y| {
        [0.2 + 0.6 * x, 0.3 + 0.4 * y, 0.8 - 0.5 * x * y]
    })?;
    let reference = gradient(64, 48, |x, y| {
        [0.9 - 0.3 * y, 0.5 + 0.4 * x * x, 0.1 + 0.2 * y]
    })?;

    let solver = SolverConfig::new(Algorithm::Bcpfw)
        .with_max_epochs(2000)
        .with_gap_tolerance(1e-8);
    let mut cfg = TransferConfig::new(16, 0.1, solver);
    cfg.snapshot_iterations = vec![0, 16, 256];
    let result = transfer(&source, &reference, &cfg)?;

    std::fs::create_dir_all(out).map_err(|e| srot::Error::io(out, e))?;
    write_png(out.join("source.png"), &source)?;
    write_png(out.join("reference.png"), &reference)?;
    for snap in &result.snapshots {
        write_png(
            out.join(format!("recolored_k{}.png", snap.iteration)),
            &snap.recolored,
        )?;
        write_gray_png(
            out.join(format!("heatmap_k{}.png", snap.iteration)),
            &snap.heatmap,
        )?;
    }
    write_png(out.join("recolored.png"), &result.recolored)?;
    write_gray_png(out.join("heatmap.png"), &result.heatmap)?;
    println!(
        "{} after {} iterations, gap {:.2e}, {} snapshots, images in {}",
        result.result.termination,
        result.result.iterations,
        result.result.final_gap,
        result.snapshots.len(),
        out.display()
    );
    Ok(())
}

fn main() -> srot::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("srot-color-transfer"));
    run_example(&out)
}
