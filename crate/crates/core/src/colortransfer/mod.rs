//! Colour transfer through semi-relaxed transport.
//!
//! Both images are quantised with k-means in RGB. The reference palette
//! weights become the relaxed marginal `a` (rows) and the source palette
//! weights the hard marginal `b` (columns), so every source pixel's mass is
//! moved. Each source centroid is then replaced by the transport-weighted
//! average of reference centroids.

mod kmeans;

use std::collections::HashSet;
use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::kernel::{Matrix, Problem, TransportPlan};
use crate::solvers::{self, default_initial_plan, Monitor, SolveResult, SolverConfig};

use kmeans::{dist2, kmeans};

/// An RGB image with channels in `[0, 1]`, row-major pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbPixels {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<[f64; 3]>,
}

impl RgbPixels {
    pub fn new(width: u32, height: u32, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != width as usize * height as usize {
            return Err(Error::input(format!(
                "{} pixels given for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(RgbPixels {
            width,
            height,
            pixels,
        })
    }

    pub fn from_rgb8(img: &RgbImage) -> Self {
        let pixels = img
            .pixels()
            .map(|p| {
                [
                    p[0] as f64 / 255.0,
                    p[1] as f64 / 255.0,
                    p[2] as f64 / 255.0,
                ]
            })
            .collect();
        RgbPixels {
            width: img.width(),
            height: img.height(),
            pixels,
        }
    }

    pub fn to_rgb8(&self) -> RgbImage {
        let to_u8 = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        let mut img = RgbImage::new(self.width, self.height);
        for (dst, src) in img.pixels_mut().zip(&self.pixels) {
            *dst = Rgb([to_u8(src[0]), to_u8(src[1]), to_u8(src[2])]);
        }
        img
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

pub fn read_png(path: impl AsRef<Path>) -> Result<RgbPixels> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.display().to_string(),
        source,
    })?;
    Ok(RgbPixels::from_rgb8(&img.to_rgb8()))
}

pub fn write_png(path: impl AsRef<Path>, img: &RgbPixels) -> Result<()> {
    let path = path.as_ref();
    img.to_rgb8().save(path).map_err(|source| Error::Image {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_gray_png(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    img.save(path).map_err(|source| Error::Image {
        path: path.display().to_string(),
        source,
    })
}

/// Quantised image: `k` centroid colours, their pixel fractions, and the
/// centroid of every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorModel {
    pub centroids: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub assignment: Vec<usize>,
}

impl ColorModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// The image with every pixel replaced by its centroid colour.
    pub fn quantized(&self, width: u32, height: u32) -> Result<RgbPixels> {
        RgbPixels::new(
            width,
            height,
            self.assignment.iter().map(|&c| self.centroids[c]).collect(),
        )
    }
}

/// k-means quantisation with k-means++ seeding, deterministic in `seed`.
///
/// `k` is reduced (with a warning) when the image has fewer distinct colours.
pub fn quantize(image: &RgbPixels, k: usize, seed: u64, max_iters: usize) -> Result<ColorModel> {
    if image.is_empty() {
        return Err(Error::input("cannot quantise an empty image"));
    }
    if k == 0 {
        return Err(Error::config("cluster count must be at least 1"));
    }
    let distinct = image
        .pixels
        .iter()
        .map(|p| p.map(f64::to_bits))
        .collect::<HashSet<_>>()
        .len();
    let k = if k > distinct {
        log::warn!("image has only {distinct} distinct colours, reducing k from {k} to {distinct}");
        distinct
    } else {
        k
    };
    let (centroids, assignment) = kmeans(&image.pixels, k, seed, max_iters);
    let mut weights = vec![0.0; centroids.len()];
    for &a in &assignment {
        weights[a] += 1.0;
    }
    let total = assignment.len() as f64;
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(ColorModel {
        centroids,
        weights,
        assignment,
    })
}

/// `C[j, i] = ‖reference_j − source_i‖²`; rows index reference colours,
/// columns index source colours.
pub fn build_cost(source: &ColorModel, reference: &ColorModel) -> Matrix {
    let mut c = Matrix::zeros(reference.k(), source.k());
    for (i, s) in source.centroids.iter().enumerate() {
        for (j, r) in reference.centroids.iter().enumerate() {
            c.set(j, i, dist2(r, s));
        }
    }
    c
}

/// Transfer problem with `a` = reference weights and `b` = source weights.
pub fn build_problem(source: &ColorModel, reference: &ColorModel, lambda: f64) -> Result<Problem> {
    Problem::new(
        build_cost(source, reference),
        reference.weights.clone(),
        source.weights.clone(),
        lambda,
    )
}

/// Colour each source centroid maps to under `plan`:
/// `(1/b_i)·Σ_j T[j,i]·reference_j`, or the original colour when `b_i = 0`.
pub fn mapped_colors(
    source: &ColorModel,
    reference: &ColorModel,
    plan: &TransportPlan,
) -> Result<Vec<[f64; 3]>> {
    if (plan.m(), plan.n()) != (reference.k(), source.k()) {
        return Err(Error::input(format!(
            "plan is {}x{}, expected {} reference by {} source colours",
            plan.m(),
            plan.n(),
            reference.k(),
            source.k()
        )));
    }
    Ok((0..source.k())
        .map(|i| {
            let b = plan.masses()[i];
            if b <= 0.0 {
                return source.centroids[i];
            }
            let mut color = [0.0; 3];
            for (t, r) in plan.column(i).iter().zip(&reference.centroids) {
                for ch in 0..3 {
                    color[ch] += t * r[ch];
                }
            }
            color.map(|v| (v / b).clamp(0.0, 1.0))
        })
        .collect())
}

/// Recolours `image` (the image `source` was fitted on) by barycentric
/// projection through `plan`.
pub fn recolor(
    image: &RgbPixels,
    source: &ColorModel,
    reference: &ColorModel,
    plan: &TransportPlan,
) -> Result<RgbPixels> {
    if image.len() != source.assignment.len() {
        return Err(Error::input(format!(
            "image has {} pixels, colour model was fitted on {}",
            image.len(),
            source.assignment.len()
        )));
    }
    let mapped = mapped_colors(source, reference, plan)?;
    RgbPixels::new(
        image.width,
        image.height,
        source.assignment.iter().map(|&c| mapped[c]).collect(),
    )
}

/// Divides each row by its sum; zero rows stay zero.
pub fn row_normalize(plan: &TransportPlan) -> Matrix {
    let mut out = plan.entries().clone();
    let sums = out.row_sums();
    for i in 0..out.cols() {
        for (v, &s) in out.col_mut(i).iter_mut().zip(&sums) {
            *v = if s > 0.0 { *v / s } else { 0.0 };
        }
    }
    out
}

/// Heat map of the row-normalised plan: an `n`-wide, `m`-tall grayscale
/// image with intensity `round(255·T[j,i]/Σ_i T[j,i])`.
pub fn heatmap(plan: &TransportPlan) -> GrayImage {
    let normalized = row_normalize(plan);
    let mut img = GrayImage::new(plan.n() as u32, plan.m() as u32);
    for j in 0..plan.m() {
        for i in 0..plan.n() {
            let v = (normalized.get(j, i).clamp(0.0, 1.0) * 255.0).round() as u8;
            img.put_pixel(i as u32, j as u32, Luma([v]));
        }
    }
    img
}

#[derive(Debug, Clone)]
pub struct TransferConfig {
    pub k_source: usize,
    pub k_reference: usize,
    pub lambda: f64,
    pub solver: TransferSolver,
    pub kmeans_seed: u64,
    pub kmeans_max_iters: usize,
    /// Iterations at which to capture recoloured images and heat maps.
    pub snapshot_iterations: Vec<u64>,
}

/// Solver used for the transport step.
#[derive(Debug, Clone)]
pub enum TransferSolver {
    FrankWolfe(SolverConfig),
    Baseline(crate::baselines::BaselineConfig),
}

impl TransferConfig {
    pub fn new(k: usize, lambda: f64, solver: SolverConfig) -> Self {
        TransferConfig {
            k_source: k,
            k_reference: k,
            lambda,
            solver: TransferSolver::FrankWolfe(solver),
            kmeans_seed: 0,
            kmeans_max_iters: 100,
            snapshot_iterations: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_source == 0 || self.k_reference == 0 {
            return Err(Error::config("cluster counts must be at least 1"));
        }
        match &self.solver {
            TransferSolver::FrankWolfe(cfg) => cfg.validate(),
            TransferSolver::Baseline(cfg) => cfg.validate(),
        }
    }
}

/// A captured intermediate state of the transfer.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub iteration: u64,
    pub recolored: RgbPixels,
    pub heatmap: GrayImage,
    pub plan: TransportPlan,
}

#[derive(Debug, Clone)]
pub struct TransferOutput {
    pub source_model: ColorModel,
    pub reference_model: ColorModel,
    pub problem: Problem,
    pub result: SolveResult,
    pub recolored: RgbPixels,
    pub heatmap: GrayImage,
    pub snapshots: Vec<Snapshot>,
}

struct SnapshotMonitor<'a> {
    image: &'a RgbPixels,
    source: &'a ColorModel,
    reference: &'a ColorModel,
    at: Vec<u64>,
    taken: Vec<Snapshot>,
}

impl Monitor for SnapshotMonitor<'_> {
    fn snapshot_iterations(&self) -> Vec<u64> {
        self.at.clone()
    }

    fn on_snapshot(&mut self, iteration: u64, plan: &TransportPlan) {
        let recolored = recolor(self.image, self.source, self.reference, plan)
            .expect("plan shape fixed by the problem");
        self.taken.push(Snapshot {
            iteration,
            recolored,
            heatmap: heatmap(plan),
            plan: plan.clone(),
        });
    }
}

/// Quantises both images, solves the transport problem from the default
/// initial plan, and recolours the source.
pub fn transfer(
    source: &RgbPixels,
    reference: &RgbPixels,
    cfg: &TransferConfig,
) -> Result<TransferOutput> {
    cfg.validate()?;
    let source_model = quantize(source, cfg.k_source, cfg.kmeans_seed, cfg.kmeans_max_iters)?;
    let reference_model = quantize(
        reference,
        cfg.k_reference,
        cfg.kmeans_seed,
        cfg.kmeans_max_iters,
    )?;
    let problem = build_problem(&source_model, &reference_model, cfg.lambda)?;
    let t0 = default_initial_plan(&problem);

    let mut monitor = SnapshotMonitor {
        image: source,
        source: &source_model,
        reference: &reference_model,
        at: cfg.snapshot_iterations.clone(),
        taken: Vec::new(),
    };
    let result = match &cfg.solver {
        TransferSolver::FrankWolfe(sc) => {
            solvers::solve_with_monitor(&problem, sc, &t0, &mut monitor)?
        }
        TransferSolver::Baseline(bc) => {
            crate::baselines::solve_baseline_with_monitor(&problem, bc, &t0, &mut monitor)?
        }
    };
    let snapshots = monitor.taken;
    let recolored = recolor(source, &source_model, &reference_model, &result.plan)?;
    let heat = heatmap(&result.plan);
    Ok(TransferOutput {
        source_model,
        reference_model,
        problem,
        result,
        recolored,
        heatmap: heat,
        snapshots,
    })
}
