//! Solvers for the convex semi-relaxed optimal transport problem
//!
//! ```text
//! min_{T ≥ 0, Tᵀ1_m = b}  ⟨T, C⟩ + (1/2λ)·‖T·1_n − a‖²
//! ```
//!
//! The column constraint is kept hard, so the feasible set is the product of
//! scaled simplices `b_1Δ_m × … × b_nΔ_m` and a linear minimisation over it
//! reduces to one argmin per column. On top of that kernel the crate provides
//! full Frank-Wolfe, block-coordinate Frank-Wolfe (uniform or permutation
//! sampling), away-step and pairwise block variants, projected gradient and
//! FISTA baselines, a colour-transfer pipeline, and a benchmark CLI.
//!
//! ```
//! use srot::instance::synthetic_instance;
//! use srot::solvers::{default_initial_plan, solve, Algorithm, SolverConfig};
//!
//! let problem = synthetic_instance(8, 8, 1.0, 7).unwrap();
//! let cfg = SolverConfig::new(Algorithm::Bcpfw).with_max_epochs(200).with_gap_tolerance(1e-8);
//! let result = solve(&problem, &cfg, &default_initial_plan(&problem)).unwrap();
//! assert!(result.final_gap <= 1e-8);
//! ```

pub mod baselines;
pub mod cli;
pub mod colortransfer;
pub mod error;
pub mod instance;
pub mod kernel;
pub mod solvers;

pub use error::{Error, Result};
pub use kernel::{Matrix, Problem, TransportPlan};
