use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{tts, AnalysisError, Repetitions};

pub const DEFAULT_PERCENTILES: [f64; 8] = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

/// Which end of a metric is hard: low percentiles are the easiest
/// instances, high percentiles the hardest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardnessOrder {
    /// Larger is harder (solution times, repetitions).
    Ascending,
    /// Smaller is harder (success probabilities).
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileCurve<T = f64> {
    pub level: f64,
    /// `(N, value at this percentile)` in increasing N.
    pub points: Vec<(usize, T)>,
}

fn rank_index(len: usize, q: f64) -> usize {
    let rank = (q * len as f64 - 1e-9).ceil().max(1.0) as usize;
    rank.min(len) - 1
}

fn pick<T: Clone>(mut values: Vec<T>, q: f64, cmp: impl Fn(&T, &T) -> std::cmp::Ordering) -> T {
    values.sort_by(cmp);
    values[rank_index(values.len(), q)].clone()
}

/// Nearest-rank percentile `q ∈ (0, 1]`: the `ceil(q·n)`-th value in
/// hardness order.
pub fn nearest_rank(values: &[f64], q: f64, order: HardnessOrder) -> Result<f64, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyData);
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(AnalysisError::InvalidProbability { name: "percentile", value: q });
    }
    Ok(pick(values.to_vec(), q, |a, b| match order {
        HardnessOrder::Ascending => a.total_cmp(b),
        HardnessOrder::Descending => b.total_cmp(a),
    }))
}

/// Percentile curves over N for each requested level.
pub fn percentile_scaling(
    groups: &BTreeMap<usize, Vec<f64>>,
    levels: &[f64],
    order: HardnessOrder,
) -> Result<Vec<PercentileCurve>, AnalysisError> {
    levels
        .iter()
        .map(|&q| {
            let points = groups
                .iter()
                .map(|(&n, vs)| nearest_rank(vs, q, order).map(|v| (n, v)))
                .collect::<Result<_, _>>()?;
            Ok(PercentileCurve { level: q, points })
        })
        .collect()
}

/// Percentile of success probability (hardest = lowest p) first, then the
/// repetitions needed at that probability.
pub fn percentiles_then_tts(
    groups: &BTreeMap<usize, Vec<f64>>,
    levels: &[f64],
    p_desired: f64,
) -> Result<Vec<PercentileCurve<Repetitions>>, AnalysisError> {
    percentile_scaling(groups, levels, HardnessOrder::Descending)?
        .into_iter()
        .map(|c| {
            let points = c
                .points
                .into_iter()
                .map(|(n, p)| tts(p, p_desired, Duration::ZERO).map(|r| (n, r.k)))
                .collect::<Result<_, _>>()?;
            Ok(PercentileCurve { level: c.level, points })
        })
        .collect()
}

/// Repetitions per instance first, then their percentile.
pub fn tts_then_percentiles(
    groups: &BTreeMap<usize, Vec<f64>>,
    levels: &[f64],
    p_desired: f64,
) -> Result<Vec<PercentileCurve<Repetitions>>, AnalysisError> {
    let mut ks: BTreeMap<usize, Vec<Repetitions>> = BTreeMap::new();
    for (&n, ps) in groups {
        if ps.is_empty() {
            return Err(AnalysisError::EmptyData);
        }
        let k = ps
            .iter()
            .map(|&p| tts(p, p_desired, Duration::ZERO).map(|r| r.k))
            .collect::<Result<_, _>>()?;
        ks.insert(n, k);
    }
    levels
        .iter()
        .map(|&q| {
            if !(q > 0.0 && q <= 1.0) {
                return Err(AnalysisError::InvalidProbability { name: "percentile", value: q });
            }
            let points = ks.iter().map(|(&n, k)| (n, pick(k.clone(), q, Ord::cmp))).collect();
            Ok(PercentileCurve { level: q, points })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nearest_rank_definition() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 0.01, HardnessOrder::Ascending).unwrap(), 1.0);
        assert_eq!(nearest_rank(&v, 0.07, HardnessOrder::Ascending).unwrap(), 7.0);
        assert_eq!(nearest_rank(&v, 0.5, HardnessOrder::Ascending).unwrap(), 50.0);
        assert_eq!(nearest_rank(&v, 0.99, HardnessOrder::Descending).unwrap(), 2.0);
        assert_eq!(nearest_rank(&[3.0], 0.5, HardnessOrder::Ascending).unwrap(), 3.0);
        assert!(nearest_rank(&[], 0.5, HardnessOrder::Ascending).is_err());
    }

    #[test]
    fn constant_groups() {
        let groups: BTreeMap<usize, Vec<f64>> = [(8, vec![2.5; 10]), (16, vec![2.5; 3])].into();
        for c in percentile_scaling(&groups, &DEFAULT_PERCENTILES, HardnessOrder::Ascending).unwrap() {
            assert!(c.points.iter().all(|&(_, v)| v == 2.5));
        }
    }

    proptest! {
        #[test]
        fn both_orders_agree(
            a in proptest::collection::vec(0.0f64..=1.0, 1..60),
            b in proptest::collection::vec(0.0f64..=1.0, 1..60),
            pd in 0.5f64..0.999,
        ) {
            let groups: BTreeMap<usize, Vec<f64>> = [(10, a), (20, b)].into();
            prop_assert_eq!(
                percentiles_then_tts(&groups, &DEFAULT_PERCENTILES, pd).unwrap(),
                tts_then_percentiles(&groups, &DEFAULT_PERCENTILES, pd).unwrap()
            );
        }
    }
}
