//! Cross-module invariants: the Ising mapping, autoscaling, ensemble
//! generation, clause capacity and the annealer's outputs.

use std::collections::BTreeSet;

use max2sat_core::analysis::rho_from_violations;
use max2sat_core::anneal::{run_instance, AnnealConfig, AnnealSchedule};
use max2sat_core::chimera::{ChimeraGraph, SelectionPolicy};
use max2sat_core::ensemble::{clause_count_for, EnsembleSpec, Subgraph};
use max2sat_core::exact::{branch_and_bound, two_sat};
use max2sat_core::formula::Assignment;
use max2sat_core::io::{read_wcnf, to_wcnf_string};
use max2sat_core::ising::{encode, map_formula, ControlErrorModel, H_RANGE, J_RANGE};
use proptest::prelude::*;

/// One random formula; callers keep `n >= 3` so `alpha <= 3` always fits.
fn formula(n: usize, alpha: f64, seed: u64) -> max2sat_core::Formula {
    EnsembleSpec::random(n, alpha, 1, seed).instance(0).formula
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn energy_is_four_violations_minus_m(
        n in 3usize..=40,
        alpha in 0.1f64..3.0,
        seed in any::<u64>(),
        bits in proptest::collection::vec(any::<bool>(), 40),
    ) {
        let f = formula(n, alpha, seed);
        let a = Assignment::from_values(bits[..n].to_vec());
        let e = map_formula(&f).energy(&encode(&a)).unwrap();
        let v = f.count_violations(&a).unwrap();
        prop_assert_eq!(e, 4.0 * v as f64 - f.num_clauses() as f64);
    }

    #[test]
    fn autoscale_fits_hardware_ranges_and_keeps_violations(
        n in 3usize..=40,
        alpha in 0.1f64..3.0,
        seed in any::<u64>(),
        bits in proptest::collection::vec(any::<bool>(), 40),
    ) {
        let f = formula(n, alpha, seed);
        let p = map_formula(&f);
        let s = p.autoscale();
        prop_assert!(s.max_abs_h() <= H_RANGE + 1e-12);
        prop_assert!(s.max_abs_j() <= J_RANGE + 1e-12);
        let spins = encode(&Assignment::from_values(bits[..n].to_vec()));
        let v = f.count_violations(&Assignment::from_values(bits[..n].to_vec())).unwrap() as f64;
        prop_assert!((s.violations_from_energy(s.energy(&spins).unwrap()) - v).abs() < 1e-9);
    }

    #[test]
    fn random_ensembles_have_round_alpha_n_distinct_clauses(n in 3usize..=60, alpha in 0.1f64..3.0, seed in any::<u64>()) {
        let spec = EnsembleSpec::random(n, alpha, 3, seed);
        for inst in spec.generate().unwrap() {
            let f = &inst.formula;
            prop_assert_eq!(f.num_clauses(), clause_count_for(alpha, n));
            let distinct: BTreeSet<_> = f.clauses().iter().collect();
            prop_assert_eq!(distinct.len(), f.num_clauses());
            prop_assert!(f.clauses().iter().all(|c| c.first().var() != c.second().var()));
        }
        // regenerating from the same seed reproduces every instance
        let again: Vec<_> = spec.generate().unwrap().map(|i| i.formula).collect();
        let first: Vec<_> = spec.generate().unwrap().map(|i| i.formula).collect();
        prop_assert_eq!(again, first);
    }

    #[test]
    fn chimera_clauses_lie_on_couplers(n in 2usize..=108, alpha in 0.1f64..2.0, seed in any::<u64>(), pick in any::<u64>()) {
        let g = ChimeraGraph::pseudo_dw1();
        let qubits = g.select_variables(n, SelectionPolicy::Random { seed: pick }).unwrap();
        let cap = g.capacity(&qubits).unwrap();
        prop_assume!(clause_count_for(alpha, n) <= cap.max_clauses());
        let sub = Subgraph::new(&g, qubits.clone()).unwrap();
        let inst = EnsembleSpec::chimera(sub, alpha, 1, seed).instance(0);
        for c in inst.formula.clauses() {
            prop_assert!(g.has_edge(qubits[c.first().var()], qubits[c.second().var()]));
        }
    }

    #[test]
    fn densities_in_the_unsat_band_are_unsatisfiable(n in 2usize..=60, pick in any::<u64>(), seed in any::<u64>(), t in 0.0f64..=1.0) {
        let g = ChimeraGraph::pseudo_dw1();
        let qubits = g.select_variables(n, SelectionPolicy::Random { seed: pick }).unwrap();
        let cap = g.capacity(&qubits).unwrap();
        prop_assume!(cap.c > 0);
        let m = 3 * cap.c + 1 + ((cap.c - 1) as f64 * t).round() as usize;
        prop_assert!(cap.forces_unsat(m));
        let sub = Subgraph::new(&g, qubits).unwrap();
        let inst = EnsembleSpec::fixed_m(n, m, Some(sub), 1, seed).instance(0);
        prop_assert!(!two_sat::is_satisfiable(&inst.formula));
    }

    #[test]
    fn wcnf_round_trips(n in 3usize..=30, alpha in 0.1f64..3.0, seed in any::<u64>()) {
        let f = formula(n, alpha, seed);
        let back = read_wcnf(to_wcnf_string(&f).as_bytes()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn rho_is_a_ratio_that_peaks_at_the_optimum(m in 1usize..200, opt_frac in 0.0f64..0.9, extra in 0usize..50) {
        let optimum = ((m as f64) * opt_frac) as usize;
        prop_assume!(optimum < m);
        let violations = (optimum + extra).min(m);
        let rho = rho_from_violations(m, violations, optimum).unwrap();
        prop_assert!((0.0..=1.0).contains(&rho));
        prop_assert_eq!(rho == 1.0, violations == optimum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn annealer_never_beats_the_optimum(n in 4usize..=24, alpha in 0.5f64..2.5, seed in any::<u64>(), noisy in any::<bool>()) {
        let f = formula(n, alpha, seed);
        let optimum = branch_and_bound(&f, None).optimum;
        let cfg = AnnealConfig {
            schedule: AnnealSchedule::new(50, 0.1, 3.0),
            reads: 10,
            noise: noisy.then(|| ControlErrorModel::new(0.1, 0.1, seed)),
            ..AnnealConfig::default()
        };
        let stats = run_instance(&f, Some(optimum), &cfg, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&stats.p_success));
        prop_assert_eq!(stats.violations_per_read.len(), 10);
        prop_assert!(stats.violations_per_read.iter().all(|&v| v >= optimum));
        prop_assert_eq!(stats.successes, stats.violations_per_read.iter().filter(|&&v| v == optimum).count());
        for (&e, &v) in stats.best_energy_per_read.iter().zip(&stats.violations_per_read) {
            prop_assert_eq!(e, 4.0 * v as f64 - f.num_clauses() as f64);
        }
        let again = run_instance(&f, Some(optimum), &cfg, seed).unwrap();
        prop_assert_eq!(again.violations_per_read, stats.violations_per_read);
    }
}
