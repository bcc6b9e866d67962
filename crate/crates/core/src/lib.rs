//! Overlapping group Lasso.
//!
//! Solves `min_x l(x) + λ1‖x‖₁ + λ2 Σ w_i‖x_{G_i}‖` for a smooth convex loss
//! `l` and possibly overlapping index sets `G_i`, using an accelerated
//! proximal gradient method ([`solver`]). The proximal operator ([`prox`])
//! first removes the `ℓ1` term by soft thresholding, then discards groups
//! that are provably zero, and solves what remains through a smooth dual
//! whose duality gap certifies the result.

pub mod data_io;
pub mod error;
pub mod group_model;
pub mod linalg;
pub mod momentum;
pub mod prox;
pub mod solver;

pub use error::{OglError, Result};
pub use group_model::{
    group_stats, penalty_value, validate_groups, GroupStats, GroupStructure, PenaltyParams,
};
pub use linalg::DenseMatrix;
pub use prox::dual::{
    duality_gap, omega_gradient, omega_value, primal_from_dual, project_omega, solve_dual,
    DualSolution, DualSolveReport, DualVariable,
};
pub use prox::{
    identify_zero_groups, prox, prox_objective, reduce_problem, soft_threshold,
    IdentificationTrace, ProxOptions, ProxSolution, ReducedProblem,
};
pub use solver::{
    default_rho_grid, foglasso_solve, foglasso_solve_warm, lambda_max, line_search_step,
    model_upper_bound, reg_path, reg_path_scaled, LeastSquaresLoss, PathEntry, PathResult,
    SmoothLoss, SolverOptions, SolverResult,
};
