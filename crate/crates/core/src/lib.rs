//! Random MAX 2-SAT benchmark toolkit: ensemble generation (unrestricted and
//! Chimera-restricted), the Ising mapping, exact solvers, a simulated
//! annealing stand-in for an annealing processor, and the statistics used to
//! compare them.

pub mod analysis;
pub mod anneal;
pub mod chimera;
pub mod ensemble;
pub mod exact;
pub mod formula;
pub mod io;
pub mod ising;
pub mod seed;

pub use anneal::{run_instance, AnnealConfig, AnnealSchedule, RunStats};
pub use chimera::{ChimeraGraph, ClauseCapacity, SelectionPolicy};
pub use ensemble::{EnsembleKind, EnsembleSpec, Instance, Subgraph};
pub use exact::{branch_and_bound, brute_force, SolveResult};
pub use formula::{Assignment, Clause, Formula, Literal};
pub use ising::{map_formula, ControlErrorModel, IsingProblem, SpinConfiguration};
