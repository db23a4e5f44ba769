//! Exact MAX 2-SAT solvers.
//!
//! [`brute_force`] enumerates every assignment of the used variables and is
//! the reference oracle. [`branch_and_bound`] is the production solver.
//! [`two_sat`] decides plain satisfiability in linear time and is used as an
//! independent cross-check of `optimum == 0`.

mod bnb;
mod brute;
mod ground;
pub mod two_sat;

use std::time::Duration;

use thiserror::Error;

use crate::formula::Assignment;

pub use bnb::{branch_and_bound, branch_and_bound_with, node_lower_bound, BnbConfig};
pub use brute::{brute_force, BRUTE_FORCE_MAX_VARS};
pub use ground::{solve_ising_ground, GroundState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{used} used variables exceed the exhaustive limit of {limit}")]
    TooManyVariables { used: usize, limit: usize },
    #[error("perturbed or formula-less Ising problem with {n} spins exceeds the exhaustive limit of {limit}")]
    IsingTooLarge { n: usize, limit: usize },
}

/// Outcome of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Minimum number of violated clauses (best found when `!optimal`).
    pub optimum: usize,
    pub assignment: Assignment,
    pub nodes_expanded: u64,
    pub elapsed: Duration,
    /// False when a budget stopped the search before optimality was proven.
    pub optimal: bool,
}
