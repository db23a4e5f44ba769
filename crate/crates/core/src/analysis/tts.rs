use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

pub const DEFAULT_P_DESIRED: f64 = 0.99;

/// Number of independent reads needed; `Unbounded` when `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Repetitions {
    Finite(u64),
    Unbounded,
}

impl Repetitions {
    pub fn finite(self) -> Option<u64> {
        match self {
            Repetitions::Finite(k) => Some(k),
            Repetitions::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtsRecord {
    pub p: f64,
    pub p_desired: f64,
    pub t_f: Duration,
    pub k: Repetitions,
    /// `t_f · k`; `None` when unbounded.
    pub t_soln: Option<Duration>,
}

/// Time to see the ground state at least once with probability `p_desired`,
/// given per-read success probability `p` and per-read time `t_f`.
pub fn tts(p: f64, p_desired: f64, t_f: Duration) -> Result<TtsRecord, AnalysisError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalysisError::InvalidProbability { name: "p", value: p });
    }
    if !(p_desired > 0.0 && p_desired < 1.0) {
        return Err(AnalysisError::InvalidProbability {
            name: "p_desired",
            value: p_desired,
        });
    }
    let k = repetitions(p, p_desired);
    let t_soln = k.finite().map(|k| t_f.saturating_mul(k.min(u32::MAX as u64) as u32));
    Ok(TtsRecord {
        p,
        p_desired,
        t_f,
        k,
        t_soln,
    })
}

fn repetitions(p: f64, p_desired: f64) -> Repetitions {
    if p == 0.0 {
        return Repetitions::Unbounded;
    }
    if p == 1.0 {
        return Repetitions::Finite(1);
    }
    let ratio = (1.0 - p_desired).ln() / (1.0 - p).ln();
    // guard against ratios like 2.0000000000000004 that are integers in exact arithmetic
    let k = (ratio * (1.0 - 1e-9)).ceil();
    if k >= u64::MAX as f64 {
        Repetitions::Finite(u64::MAX)
    } else {
        Repetitions::Finite((k as u64).max(1))
    }
}
