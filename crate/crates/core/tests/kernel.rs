use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srot::instance::synthetic_instance;
use srot::kernel::io::{
    decode_binary_matrix, encode_binary_matrix, parse_csv_matrix, read_matrix, write_matrix,
};
use srot::kernel::{
    duality_gap, duality_gap_of, gradient_block, lmo_full, objective, project_scaled_simplex,
    RowSumCache,
};
use srot::{Error, Matrix, Problem, TransportPlan};

fn random_plan(rng: &mut ChaCha8Rng, p: &Problem) -> TransportPlan {
    let mut t = Matrix::zeros(p.m(), p.n());
    for i in 0..p.n() {
        let w: Vec<f64> = (0..p.m()).map(|_| rng.random_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        for (j, x) in w.iter().enumerate() {
            t.set(j, i, x / s * p.target_marginal()[i]);
        }
    }
    TransportPlan::for_problem(p, t).unwrap()
}

fn f_direct(p: &Problem, t: &Matrix) -> f64 {
    let mut f = 0.0;
    for j in 0..p.m() {
        let row: f64 = (0..p.n()).map(|i| t.get(j, i)).sum();
        f += (0..p.n())
            .map(|i| t.get(j, i) * p.cost().get(j, i))
            .sum::<f64>();
        f += (row - p.source_marginal()[j]).powi(2) / (2.0 * p.lambda());
    }
    f
}

#[test]
fn objective_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = synthetic_instance(7, 3, 0.3, 4).unwrap();
    let plan = random_plan(&mut rng, &p);
    assert_abs_diff_eq!(
        objective(&p, &plan).unwrap(),
        f_direct(&p, plan.entries()),
        epsilon = 1e-13
    );
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..10 {
        let p = synthetic_instance(5, 4, [0.1, 1.0, 10.0][seed % 3], seed as u64).unwrap();
        let plan = random_plan(&mut rng, &p);
        let cache = RowSumCache::new(&plan);
        let h = 1e-6;
        for i in 0..p.n() {
            let g = gradient_block(&p, &cache, i).unwrap();
            for j in 0..p.m() {
                let mut plus = plan.entries().clone();
                let mut minus = plan.entries().clone();
                plus.set(j, i, plus.get(j, i) + h);
                minus.set(j, i, minus.get(j, i) - h);
                let fd = (f_direct(&p, &plus) - f_direct(&p, &minus)) / (2.0 * h);
                assert!(
                    (fd - g.values[j]).abs() <= 1e-5 * (1.0 + fd.abs()),
                    "fd {fd} vs {}",
                    g.values[j]
                );
            }
        }
    }
}

#[test]
fn gap_upper_bounds_suboptimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = synthetic_instance(6, 5, 1.0, 3).unwrap();
    let reference = srot::baselines::BaselineConfig::new(srot::baselines::BaselineAlgorithm::Fista)
        .with_max_iterations(100_000)
        .with_gap_tolerance(1e-12);
    let t0 = srot::solvers::default_initial_plan(&p);
    let f_star = srot::baselines::solve_baseline(&p, &reference, &t0)
        .unwrap()
        .final_objective();
    for _ in 0..200 {
        let plan = random_plan(&mut rng, &p);
        let gap = duality_gap_of(&p, &plan).unwrap();
        let s = lmo_full(&p, &plan).unwrap();
        assert_abs_diff_eq!(gap, duality_gap(&p, &plan, &s).unwrap(), epsilon = 1e-12);
        assert!(gap >= 0.0);
        assert!(objective(&p, &plan).unwrap() - f_star <= gap + 1e-10);
    }
}

#[test]
fn problem_rejects_bad_shapes() {
    let c = Matrix::zeros(2, 2);
    let err = Problem::new(c.clone(), vec![0.3, 0.3, 0.4], vec![0.5, 0.5], 1.0).unwrap_err();
    assert!(matches!(err, Error::Instance(ref s) if s.contains("m = ")));
    assert!(Problem::new(c.clone(), vec![0.5, 0.5], vec![0.5, 0.5], 0.0).is_err());
    assert!(Problem::new(c.clone(), vec![0.5, 0.5], vec![-0.5, 1.5], 1.0).is_err());
    assert!(Problem::new(c, vec![0.5, 0.5], vec![0.0, 0.0], 1.0).is_err());
}

#[test]
fn matrix_io_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = Matrix::from_rows(&[vec![0.1, 1e-300, -2.5], vec![3.0, 0.0, 1.0 / 3.0]]).unwrap();
    for name in ["m.csv", "m.bin"] {
        let path = dir.path().join(name);
        write_matrix(&path, &m).unwrap();
        assert_eq!(read_matrix(&path).unwrap(), m);
    }
    assert_eq!(decode_binary_matrix(&encode_binary_matrix(&m)).unwrap(), m);
    assert!(parse_csv_matrix("1,2\n3\n").is_err());
    assert!(decode_binary_matrix(&[0u8; 7]).is_err());
}

proptest! {
    #[test]
    fn projection_is_feasible_and_idempotent(
        v in prop::collection::vec(-5.0f64..5.0, 1..12),
        radius in 0.0f64..3.0,
    ) {
        let y = project_scaled_simplex(&v, radius).unwrap();
        let sum: f64 = y.iter().sum();
        prop_assert!((sum - radius).abs() <= 1e-12 * (1.0 + radius));
        prop_assert!(y.iter().all(|&x| x >= 0.0));
        let z = project_scaled_simplex(&y, radius).unwrap();
        for (a, b) in y.iter().zip(&z) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_is_closest_point(
        v in prop::collection::vec(-3.0f64..3.0, 2..8),
        w in prop::collection::vec(0.0f64..1.0, 8),
    ) {
        let y = project_scaled_simplex(&v, 1.0).unwrap();
        let w = &w[..v.len()];
        let s: f64 = w.iter().sum::<f64>().max(1e-9);
        let other: Vec<f64> = w.iter().map(|x| x / s).collect();
        let d = |p: &[f64]| p.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        prop_assert!(d(&y) <= d(&other) + 1e-12);
    }

    #[test]
    fn gap_is_nonnegative(seed in 0u64..500, m in 1usize..7, n in 1usize..7) {
        let p = synthetic_instance(m, n, 0.5, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plan = random_plan(&mut rng, &p);
        prop_assert!(duality_gap_of(&p, &plan).unwrap() >= 0.0);
    }
}
