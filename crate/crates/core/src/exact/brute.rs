use std::time::Instant;

use super::{SolveError, SolveResult};
use crate::formula::{Assignment, Formula};

pub const BRUTE_FORCE_MAX_VARS: usize = 26;

/// Exhaustive minimum over all assignments of the used variables, visited in
/// Gray-code order. Unused variables are set TRUE.
pub fn brute_force(f: &Formula) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let used = f.used_variables();
    let vars: Vec<usize> = (0..f.n_declared()).filter(|&v| used[v]).collect();
    if vars.len() > BRUTE_FORCE_MAX_VARS {
        return Err(SolveError::TooManyVariables {
            used: vars.len(),
            limit: BRUTE_FORCE_MAX_VARS,
        });
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    let mut slot = vec![usize::MAX; f.n_declared()];
    for (i, &v) in vars.iter().enumerate() {
        slot[v] = i;
    }
    for (k, c) in f.clauses().iter().enumerate() {
        incident[slot[c.first().var()]].push(k);
        incident[slot[c.second().var()]].push(k);
    }

    let mut a = Assignment::all_true(f.n_declared());
    let mut violations = f.clauses().iter().filter(|c| c.is_violated_by(&a)).count();
    let mut best = violations;
    let mut best_code: u64 = 0;
    let total: u64 = 1 << vars.len();
    for i in 1..total {
        let bit = i.trailing_zeros() as usize;
        let v = vars[bit];
        let clauses = f.clauses();
        for &k in &incident[bit] {
            violations -= clauses[k].is_violated_by(&a) as usize;
        }
        a.set(v, !a.value(v));
        for &k in &incident[bit] {
            violations += clauses[k].is_violated_by(&a) as usize;
        }
        if violations < best {
            best = violations;
            best_code = i ^ (i >> 1);
        }
    }

    let mut assignment = Assignment::all_true(f.n_declared());
    for (bit, &v) in vars.iter().enumerate() {
        if best_code >> bit & 1 == 1 {
            assignment.set(v, false);
        }
    }
    Ok(SolveResult {
        optimum: best,
        assignment,
        nodes_expanded: total,
        elapsed: start.elapsed(),
        optimal: true,
    })
}
