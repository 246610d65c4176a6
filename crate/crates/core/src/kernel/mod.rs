//! Shared numeric kernel: problem and plan types, objective and gradient
//! evaluation, the vertex oracles, the duality gap, and simplex projection.

pub mod io;
pub mod matrix;
pub mod oracle;
pub mod plan;
pub mod problem;
pub mod simplex;

pub use matrix::Matrix;
pub use oracle::{
    away_oracle_block, away_oracle_block_with, duality_gap, duality_gap_of, gradient_block,
    lmo_block, lmo_full, objective, AwayRule, GradientBlock,
};
pub use plan::{RowSumCache, TransportPlan};
pub use problem::Problem;
pub use simplex::project_scaled_simplex;
