//! Exact solvers checked against each other on random formulas.

use max2sat_core::ensemble::EnsembleSpec;
use max2sat_core::exact::{branch_and_bound, brute_force, node_lower_bound, solve_ising_ground, two_sat};
use max2sat_core::ising::{decode, map_formula};
use proptest::prelude::*;

/// One random formula; callers keep `n >= 3` so `alpha <= 3` always fits.
fn formula(n: usize, alpha: f64, seed: u64) -> max2sat_core::Formula {
    EnsembleSpec::random(n, alpha, 1, seed).instance(0).formula
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn branch_and_bound_matches_brute_force(n in 3usize..=14, alpha in 0.25f64..3.0, seed in any::<u64>()) {
        let f = formula(n, alpha, seed);
        let bnb = branch_and_bound(&f, None);
        let brute = brute_force(&f).unwrap();
        prop_assert!(bnb.optimal);
        prop_assert_eq!(bnb.optimum, brute.optimum);
        prop_assert_eq!(f.count_violations(&bnb.assignment).unwrap(), bnb.optimum);
        prop_assert_eq!(f.count_violations(&brute.assignment).unwrap(), brute.optimum);
    }

    #[test]
    fn implication_graph_decides_satisfiability(n in 3usize..=14, alpha in 0.25f64..3.0, seed in any::<u64>()) {
        let f = formula(n, alpha, seed);
        let optimum = brute_force(&f).unwrap().optimum;
        prop_assert_eq!(two_sat::is_satisfiable(&f), optimum == 0);
        if let Some(a) = two_sat::solve(&f) {
            prop_assert_eq!(f.count_violations(&a).unwrap(), 0);
        }
    }

    #[test]
    fn root_lower_bound_is_admissible(n in 3usize..=14, alpha in 0.25f64..3.0, seed in any::<u64>()) {
        let f = formula(n, alpha, seed);
        let optimum = brute_force(&f).unwrap().optimum;
        prop_assert!(node_lower_bound(&f, &vec![None; n]) <= optimum);
    }

    #[test]
    fn ising_ground_state_is_the_max2sat_optimum(n in 3usize..=12, alpha in 0.25f64..3.0, seed in any::<u64>()) {
        let f = formula(n, alpha, seed);
        let p = map_formula(&f);
        let ground = solve_ising_ground(&p, Some(&f)).unwrap();
        let optimum = brute_force(&f).unwrap().optimum;
        prop_assert_eq!(ground.energy, 4.0 * optimum as f64 - f.num_clauses() as f64);
        prop_assert_eq!(f.count_violations(&decode(&ground.spins)).unwrap(), optimum);
    }
}

#[test]
fn budget_zero_reports_unproven() {
    let f = formula(40, 2.0, 9);
    let r = branch_and_bound(&f, Some(std::time::Duration::ZERO));
    assert!(!r.optimal);
    // the incumbent is still a valid assignment with the reported count
    assert_eq!(f.count_violations(&r.assignment).unwrap(), r.optimum);
}
