use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Counts on a regular `x × y` grid; `density` normalizes each x column to
/// sum to 1 (empty columns stay 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// `counts[ix][iy]`
    pub counts: Vec<Vec<u64>>,
    pub density: Vec<Vec<f64>>,
}

fn edges(values: &[f64], bins: usize) -> Vec<f64> {
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if lo == hi {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
}

fn bin(edges: &[f64], v: f64) -> usize {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    (((v - lo) / (hi - lo) * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

/// Column-normalized 2-D histogram spanning the data range on each axis.
pub fn density_histogram(x: &[f64], y: &[f64], x_bins: usize, y_bins: usize) -> Result<Histogram2D, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x_bins == 0 || y_bins == 0 {
        return Err(AnalysisError::InvalidBins);
    }
    let (x_edges, y_edges) = (edges(x, x_bins), edges(y, y_bins));
    let mut counts = vec![vec![0u64; y_bins]; x_bins];
    for (&a, &b) in x.iter().zip(y) {
        counts[bin(&x_edges, a)][bin(&y_edges, b)] += 1;
    }
    let density = counts
        .iter()
        .map(|col| {
            let total: u64 = col.iter().sum();
            col.iter()
                .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
                .collect()
        })
        .collect();
    Ok(Histogram2D {
        x_edges,
        y_edges,
        counts,
        density,
    })
}
