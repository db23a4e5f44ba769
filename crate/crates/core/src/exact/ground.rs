use super::{branch_and_bound, SolveError, BRUTE_FORCE_MAX_VARS};
use crate::formula::Formula;
use crate::ising::{encode, IsingProblem, SpinConfiguration};

/// Exact Ising minimum and one configuration attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub spins: SpinConfiguration,
}

/// Exhaustive over active spins when there are at most 26 of them (inactive
/// spins are set +1). Larger problems are only accepted as the unperturbed
/// image of `origin`, which is then solved by branch and bound.
pub fn solve_ising_ground(p: &IsingProblem, origin: Option<&Formula>) -> Result<GroundState, SolveError> {
    let active: Vec<usize> = (0..p.n()).filter(|&j| p.active()[j]).collect();
    if active.len() <= BRUTE_FORCE_MAX_VARS {
        return Ok(exhaustive(p, &active));
    }
    match origin {
        Some(f) if !p.is_perturbed() && f.n_declared() == p.n() => {
            let r = branch_and_bound(f, None);
            let energy = (4.0 * r.optimum as f64 - p.offset()) / p.scale_factor();
            Ok(GroundState {
                energy,
                spins: encode(&r.assignment),
            })
        }
        _ => Err(SolveError::IsingTooLarge {
            n: active.len(),
            limit: BRUTE_FORCE_MAX_VARS,
        }),
    }
}

fn exhaustive(p: &IsingProblem, active: &[usize]) -> GroundState {
    let n = p.n();
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(a, b), &j) in p.couplers() {
        neighbors[a].push((b, j));
        neighbors[b].push((a, j));
    }
    let mut s = SpinConfiguration::all_up(n);
    let mut energy = p.energy(&s).expect("length matches");
    let mut best = energy;
    let mut best_code: u64 = 0;
    for i in 1..(1u64 << active.len()) {
        let j = active[i.trailing_zeros() as usize];
        let spins = s.spins();
        let local = p.h()[j] + neighbors[j].iter().map(|&(k, w)| w * spins[k] as f64).sum::<f64>();
        energy -= 2.0 * spins[j] as f64 * local;
        s.flip(j);
        if energy < best - 1e-9 {
            best = energy;
            best_code = i ^ (i >> 1);
        }
    }
    let mut spins = SpinConfiguration::all_up(n);
    for (bit, &j) in active.iter().enumerate() {
        if best_code >> bit & 1 == 1 {
            spins.flip(j);
        }
    }
    GroundState {
        energy: p.energy(&spins).expect("length matches"),
        spins,
    }
}
