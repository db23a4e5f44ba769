use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Key};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsatPoint {
    pub alpha: f64,
    pub instances: usize,
    pub satisfiable: usize,
    pub p_sat: f64,
}

/// Fraction of instances with optimum 0 at each α, in increasing α.
pub fn psat_curve(optima: &[(f64, usize)]) -> Result<Vec<PsatPoint>, AnalysisError> {
    if optima.is_empty() {
        return Err(AnalysisError::EmptyData);
    }
    let mut groups: BTreeMap<Key, (usize, usize)> = BTreeMap::new();
    for &(alpha, opt) in optima {
        let g = groups.entry(Key(alpha)).or_default();
        g.0 += 1;
        g.1 += (opt == 0) as usize;
    }
    Ok(groups
        .into_iter()
        .map(|(alpha, (instances, satisfiable))| PsatPoint {
            alpha: alpha.0,
            instances,
            satisfiable,
            p_sat: satisfiable as f64 / instances as f64,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingWindow {
    pub alpha_left: f64,
    pub alpha_right: f64,
    pub width: f64,
    pub thresholds: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WindowResult {
    Defined(ScalingWindow),
    /// At least one threshold is never crossed downward on the sampled grid.
    Undefined {
        left: Option<f64>,
        right: Option<f64>,
    },
}

impl WindowResult {
    pub fn window(&self) -> Option<&ScalingWindow> {
        match self {
            WindowResult::Defined(w) => Some(w),
            WindowResult::Undefined { .. } => None,
        }
    }
}

/// First α at which the sampled curve falls from `>= level` to `< level`,
/// linearly interpolated between the two grid points.
fn first_crossing(curve: &[(f64, f64)], level: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((a0, y0), (a1, y1)) = (w[0], w[1]);
        (y0 >= level && y1 < level).then(|| a0 + (y0 - level) / (y0 - y1) * (a1 - a0))
    })
}

/// Window between the first downward crossings of `high` and `low`.
pub fn scaling_window(curve: &[(f64, f64)], high: f64, low: f64) -> Result<WindowResult, AnalysisError> {
    if curve.len() < 2 {
        return Err(AnalysisError::TooFewPoints {
            needed: 2,
            got: curve.len(),
        });
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(AnalysisError::NotIncreasing);
    }
    let (left, right) = (first_crossing(curve, high), first_crossing(curve, low));
    Ok(match (left, right) {
        (Some(l), Some(r)) if l <= r => WindowResult::Defined(ScalingWindow {
            alpha_left: l,
            alpha_right: r,
            width: r - l,
            thresholds: (high, low),
        }),
        _ => WindowResult::Undefined { left, right },
    })
}

/// `y = prefactor · x^exponent`, fitted by least squares in log–log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLaw, AnalysisError> {
    if points.len() < 2 {
        return Err(AnalysisError::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(AnalysisError::NonPositive("power-law fit"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::NotIncreasing);
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    Ok(PowerLaw {
        prefactor: intercept.exp(),
        exponent: slope,
        r_squared: super::fit::r_squared(ss_res, ss_tot),
    })
}
