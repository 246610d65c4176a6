//! Synthetic problem instances.
//!
//! Cost entries are i.i.d. uniform on `[0, 1)`; `a` and `b` are drawn
//! uniform on `[0, 1)` and normalised to sum to 1. Draw order is the cost in
//! row-major order, then `a`, then `b`, from a ChaCha8 stream seeded with
//! `seed`, so a given `(m, n, lambda, seed)` always yields the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::kernel::{Matrix, Problem};

pub fn synthetic_instance(m: usize, n: usize, lambda: f64, seed: u64) -> Result<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cost = Matrix::zeros(m, n);
    for r in 0..m {
        for c in 0..n {
            cost.set(r, c, rng.random::<f64>());
        }
    }
    let a = normalized(&mut rng, m);
    let b = normalized(&mut rng, n);
    Problem::new(cost, a, b, lambda)
}

fn normalized(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        v.fill(1.0 / len as f64);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_normalised() {
        let p = synthetic_instance(5, 3, 0.1, 42).unwrap();
        let q = synthetic_instance(5, 3, 0.1, 42).unwrap();
        assert_eq!(p.cost(), q.cost());
        assert_eq!(p.source_marginal(), q.source_marginal());
        assert!((p.source_marginal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p.target_marginal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.cost().as_slice().iter().all(|&c| (0.0..1.0).contains(&c)));
        let r = synthetic_instance(5, 3, 0.1, 43).unwrap();
        assert_ne!(p.cost(), r.cost());
    }
}
