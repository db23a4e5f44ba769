//! Derived statistics: time to solution, P(SAT) curves and scaling windows,
//! ansatz fits and data collapse, percentile scaling, rank correlation,
//! empirical approximation ratios and density histograms.

mod collapse;
mod correlation;
mod fit;
mod histogram;
mod percentile;
mod plot;
mod psat;
mod rho;
mod tts;

use thiserror::Error;

pub use collapse::{data_collapse, CollapseForm, CollapsePoint, CollapseResult, DEFAULT_EXPONENT_GRID};
pub use correlation::{average_ranks, ordinal_ranks, rank_correlation, Correlation, RankCorrelation};
pub use fit::{fit, fit_with, r_squared, FitForm, FitModel, FitOptions, FitPoint};
pub use histogram::{density_histogram, Histogram2D};
pub use percentile::{
    nearest_rank, percentile_scaling, percentiles_then_tts, tts_then_percentiles, HardnessOrder, PercentileCurve,
    DEFAULT_PERCENTILES,
};
pub use plot::{PlotData, Series};
pub use psat::{power_law_fit, psat_curve, scaling_window, PowerLaw, PsatPoint, ScalingWindow, WindowResult};
pub use rho::{empirical_rho, rho_from_violations};
pub use tts::{tts, Repetitions, TtsRecord, DEFAULT_P_DESIRED};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no data")]
    EmptyData,
    #[error("{name} = {value} is outside its allowed range")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("abscissae must be strictly increasing")]
    NotIncreasing,
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("data collapse needs at least two distinct curves, got {0}")]
    TooFewCurves(usize),
    #[error("values must be positive for {0}")]
    NonPositive(&'static str),
    #[error("no satisfiable clauses: M - optimum = 0")]
    ZeroTarget,
    #[error("optimum {optimum} exceeds clause count {m}")]
    OptimumExceedsClauses { optimum: usize, m: usize },
    #[error("bin counts must be at least 1")]
    InvalidBins,
    #[error(transparent)]
    Formula(#[from] crate::formula::FormulaError),
}

/// Total-order key for grouping by floating-point abscissae such as α.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Key(pub f64);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
