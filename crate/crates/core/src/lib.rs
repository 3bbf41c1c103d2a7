//! Convex feasibility over simple domains, solved by letting online
//! learners play the game `g(x, p) = Σ p_j f_j(x)`.
//!
//! A program `f_j(x) <= 0` over a simplex, ball or box is handed to one of
//! three meta-solvers. Each returns either an approximately feasible point
//! or a distribution over constraints whose weighted sum is positive on the
//! whole domain.

// `!(x > 0.0)` is how argument checks reject NaN alongside bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constraint;
pub mod domain;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod minimize;
pub mod online;
pub mod params;
pub mod problem;
pub mod problems;
pub mod projections;
pub mod reductions;
pub mod solvers;

pub use constraint::ConstraintFn;
pub use domain::Domain;
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use params::ProblemParams;
pub use problem::{
    estimate_parameters, game_loss, optimization_oracle, separation_oracle, OracleResult, Problem, ViolationReport,
};
pub use solvers::{Outcome, PrimalLearner, Solution, SolveOptions};
