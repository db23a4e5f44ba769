use serde::{Deserialize, Serialize};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Correlation {
    Defined(f64),
    /// One of the inputs has no rank variance.
    Undefined,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub spearman: Correlation,
    /// `(rank_x, rank_y)` per instance; ranks are 1..=n with ties broken by
    /// position.
    pub copula: Vec<(usize, usize)>,
}

fn order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Ranks 1..=n with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let idx = order(values);
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Distinct ranks 1..=n, ties broken by position.
pub fn ordinal_ranks(values: &[f64]) -> Vec<usize> {
    let mut ranks = vec![0; values.len()];
    for (r, i) in order(values).into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Correlation {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Correlation::Undefined;
    }
    // sqrt(sxx·sxx) = sxx exactly; avoids rounding away from ±1 for
    // identical or reversed rankings
    let denom = if sxx == syy { sxx } else { sxx.sqrt() * syy.sqrt() };
    Correlation::Defined((sxy / denom).clamp(-1.0, 1.0))
}

/// Spearman coefficient (average ranks) and the copula rank pairs.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<RankCorrelation, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(AnalysisError::TooFewPoints { needed: 2, got: x.len() });
    }
    let spearman = pearson(&average_ranks(x), &average_ranks(y));
    let copula = ordinal_ranks(x).into_iter().zip(ordinal_ranks(y)).collect();
    Ok(RankCorrelation { spearman, copula })
}
