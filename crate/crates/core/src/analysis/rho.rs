use super::AnalysisError;
use crate::formula::{Assignment, Formula};

/// Satisfied clauses of `proposed` divided by the maximum satisfiable,
/// `(M - violations) / (M - optimum)`.
pub fn empirical_rho(f: &Formula, proposed: &Assignment, optimum: usize) -> Result<f64, AnalysisError> {
    let m = f.num_clauses();
    if optimum > m {
        return Err(AnalysisError::OptimumExceedsClauses { optimum, m });
    }
    if m == optimum {
        return Err(AnalysisError::ZeroTarget);
    }
    let v = f.count_violations(proposed)?;
    rho_from_violations(m, v, optimum)
}

/// `(M - violations) / (M - optimum)` from counts alone.
pub fn rho_from_violations(m: usize, violations: usize, optimum: usize) -> Result<f64, AnalysisError> {
    if optimum > m {
        return Err(AnalysisError::OptimumExceedsClauses { optimum, m });
    }
    if m == optimum {
        return Err(AnalysisError::ZeroTarget);
    }
    Ok(m.saturating_sub(violations) as f64 / (m - optimum) as f64)
}
