use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AnalysisError, FitPoint, Key};

pub type CollapsePoint = FitPoint;

pub const DEFAULT_EXPONENT_GRID: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];

/// How a trial exponent maps a family of curves onto a common axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum CollapseForm {
    /// Success probabilities: `p^(N^-e)` should be a single function of α
    /// for every N.
    Probability,
    /// Times to solution with known prefactor `a`: `ln(T/a) / α^e` should be
    /// a single function of N for every α.
    TimeToSolution { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub exponent: f64,
    /// Within-abscissa sum of squares as a fraction of the total; 0 for a
    /// perfect collapse.
    pub residual: f64,
    pub scores: Vec<(f64, f64)>,
}

impl CollapseForm {
    /// (curve key, abscissa, transformed value)
    fn transform(self, p: &CollapsePoint, e: f64) -> (f64, f64, f64) {
        match self {
            CollapseForm::Probability => (p.n, p.alpha, p.y.powf(p.n.powf(-e))),
            CollapseForm::TimeToSolution { a } => (p.alpha, p.n, (p.y / a).ln() / p.alpha.powf(e)),
        }
    }

    fn curve_key(self, p: &CollapsePoint) -> f64 {
        self.transform(p, 1.0).0
    }
}

fn score(data: &[CollapsePoint], form: CollapseForm, e: f64) -> Result<f64, AnalysisError> {
    let mut by_x: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    for p in data {
        let (_, x, z) = form.transform(p, e);
        if !z.is_finite() {
            return Err(AnalysisError::NonPositive("data collapse"));
        }
        by_x.entry(Key(x)).or_default().push(z);
    }
    let all: Vec<f64> = by_x.values().flatten().copied().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let total: f64 = all.iter().map(|z| (z - mean).powi(2)).sum();
    let within: f64 = by_x
        .values()
        .map(|zs| {
            let m = zs.iter().sum::<f64>() / zs.len() as f64;
            zs.iter().map(|z| (z - m).powi(2)).sum::<f64>()
        })
        .sum();
    Ok(if total > 0.0 { within / total } else { 0.0 })
}

/// Scores every exponent in `grid` and returns the one giving the tightest
/// collapse (first on ties).
pub fn data_collapse(data: &[CollapsePoint], form: CollapseForm, grid: &[f64]) -> Result<CollapseResult, AnalysisError> {
    if grid.is_empty() || data.is_empty() {
        return Err(AnalysisError::EmptyData);
    }
    let curves: BTreeSet<Key> = data.iter().map(|p| Key(form.curve_key(p))).collect();
    if curves.len() < 2 {
        return Err(AnalysisError::TooFewCurves(curves.len()));
    }
    let scores = grid
        .iter()
        .map(|&e| score(data, form, e).map(|s| (e, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let &(exponent, residual) = scores
        .iter()
        .reduce(|best, s| if s.1 < best.1 { s } else { best })
        .expect("grid is nonempty");
    Ok(CollapseResult {
        exponent,
        residual,
        scores,
    })
}
