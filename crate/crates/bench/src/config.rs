//! Declarative experiment description, loaded from a single JSON file and
//! adjustable field by field from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use max2sat_core::analysis::{DEFAULT_EXPONENT_GRID, DEFAULT_PERCENTILES, DEFAULT_P_DESIRED};
use max2sat_core::anneal::{AnnealConfig, AnnealSchedule, DEFAULT_READS};
use max2sat_core::chimera::{ChimeraGraph, MaskFile, SelectionPolicy};
use max2sat_core::ensemble::{grid_alpha_values, GRID_N_VALUES};
use max2sat_core::ising::ControlErrorModel;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    /// Root of every derived seed.
    pub seed: u64,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
    pub graph: GraphConfig,
    pub ensembles: EnsembleConfig,
    pub solver: SolverConfig,
    pub anneal: AnnealSettings,
    pub analysis: AnalysisSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            output_dir: PathBuf::from("max2sat-out"),
            seed: 2014,
            workers: None,
            graph: GraphConfig::default(),
            ensembles: EnsembleConfig::default(),
            solver: SolverConfig::default(),
            anneal: AnnealSettings::default(),
            analysis: AnalysisSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Topology {
    /// The 108-qubit seeded stand-in for the DW1 working graph.
    PseudoDw1,
    Ideal { rows: usize, cols: usize },
    /// A mask file (`{rows, cols, inactive: [...]}`).
    Mask { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub topology: Topology,
    pub selection: SelectionPolicy,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            topology: Topology::PseudoDw1,
            selection: SelectionPolicy::default(),
        }
    }
}

impl GraphConfig {
    pub fn load(&self) -> Result<ChimeraGraph> {
        Ok(match &self.topology {
            Topology::PseudoDw1 => ChimeraGraph::pseudo_dw1(),
            Topology::Ideal { rows, cols } => ChimeraGraph::ideal(*rows, *cols),
            Topology::Mask { path } => {
                let text = fs::read_to_string(path).map_err(|source| BenchError::ConfigIo {
                    path: path.clone(),
                    source,
                })?;
                let mask: MaskFile = serde_json::from_str(&text).map_err(|source| BenchError::ConfigParse {
                    path: path.clone(),
                    source,
                })?;
                ChimeraGraph::from_mask_file(&mask)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedMConfig {
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub count: usize,
    /// Restrict clauses to the hardware graph.
    pub chimera: bool,
}

impl Default for FixedMConfig {
    fn default() -> Self {
        FixedMConfig {
            m_values: vec![10, 20, 40],
            n_values: vec![40, 60, 80, 108],
            count: 50,
            chimera: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    /// Instances per hardware-compatible `(N, α)` cell; 0 skips them.
    pub chimera_count: usize,
    /// Instances per unrestricted `(N, α)` cell; 0 skips them.
    pub random_count: usize,
    pub fixed_m: Option<FixedMConfig>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_values: GRID_N_VALUES.to_vec(),
            alpha_values: grid_alpha_values(),
            chimera_count: 50,
            random_count: 0,
            fixed_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Wall-clock budget per instance and repeat.
    pub budget_ms: Option<u64>,
    /// Deterministic cap on branch-and-bound nodes per instance.
    pub node_limit: Option<u64>,
    /// Solves per instance; the reported time is the median.
    pub repeats: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            budget_ms: Some(10_000),
            node_limit: None,
            repeats: 1,
        }
    }
}

impl SolverConfig {
    pub fn budget(&self) -> Option<Duration> {
        self.budget_ms.map(Duration::from_millis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSettings {
    pub sweeps: usize,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub reads: usize,
    /// Nominal per-read time in milliseconds for time-to-solution.
    pub t_f_ms: f64,
    pub noise_sigma_h: f64,
    pub noise_sigma_j: f64,
    pub noise_seed: u64,
}

impl Default for AnnealSettings {
    fn default() -> Self {
        let s = AnnealSchedule::default();
        AnnealSettings {
            sweeps: s.sweeps,
            beta_initial: s.beta_initial,
            beta_final: s.beta_final,
            reads: DEFAULT_READS,
            t_f_ms: 1.0,
            noise_sigma_h: 0.0,
            noise_sigma_j: 0.0,
            noise_seed: 0,
        }
    }
}

impl AnnealSettings {
    pub fn noise(&self) -> Option<ControlErrorModel> {
        (self.noise_sigma_h > 0.0 || self.noise_sigma_j > 0.0)
            .then(|| ControlErrorModel::new(self.noise_sigma_h, self.noise_sigma_j, self.noise_seed))
    }

    pub fn t_f(&self) -> Duration {
        Duration::from_secs_f64(self.t_f_ms / 1000.0)
    }

    pub fn to_anneal_config(&self) -> AnnealConfig {
        AnnealConfig {
            schedule: AnnealSchedule::new(self.sweeps, self.beta_initial, self.beta_final),
            reads: self.reads,
            t_f: self.t_f(),
            noise: self.noise(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    pub p_desired: f64,
    /// P(SAT) levels bounding the scaling window.
    pub window_high: f64,
    pub window_low: f64,
    pub percentiles: Vec<f64>,
    /// Clause density at which percentile scaling is reported.
    pub percentile_alpha: f64,
    pub collapse_grid: Vec<f64>,
    pub density_bins: (usize, usize),
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            p_desired: DEFAULT_P_DESIRED,
            window_high: 0.98,
            window_low: 0.3,
            percentiles: DEFAULT_PERCENTILES.to_vec(),
            percentile_alpha: 2.0,
            collapse_grid: DEFAULT_EXPONENT_GRID.to_vec(),
            density_bins: (20, 20),
        }
    }
}

/// Command-line replacements for individual config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub budget_ms: Option<u64>,
    pub reads: Option<usize>,
    pub sweeps: Option<usize>,
    pub noise_sigma_h: Option<f64>,
    pub noise_sigma_j: Option<f64>,
    pub p_desired: Option<f64>,
}

impl ExperimentConfig {
    /// Parses and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| BenchError::ConfigIo {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|source| BenchError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.output_dir = v.clone();
        }
        if let Some(v) = o.workers {
            self.workers = Some(v);
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.budget_ms {
            self.solver.budget_ms = Some(v);
        }
        if let Some(v) = o.reads {
            self.anneal.reads = v;
        }
        if let Some(v) = o.sweeps {
            self.anneal.sweeps = v;
        }
        if let Some(v) = o.noise_sigma_h {
            self.anneal.noise_sigma_h = v;
        }
        if let Some(v) = o.noise_sigma_j {
            self.anneal.noise_sigma_j = v;
        }
        if let Some(v) = o.p_desired {
            self.analysis.p_desired = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if let Topology::Mask { path } = &self.graph.topology {
            if !path.exists() {
                return fail(format!("mask file {} does not exist", path.display()));
            }
        }
        let e = &self.ensembles;
        if e.chimera_count + e.random_count > 0 {
            if e.n_values.is_empty() || e.alpha_values.is_empty() {
                return fail("ensembles.n_values and ensembles.alpha_values must be nonempty".into());
            }
            if e.n_values.contains(&0) {
                return fail("ensembles.n_values must be positive".into());
            }
            if e.alpha_values.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return fail("ensembles.alpha_values must be positive".into());
            }
        }
        if let Some(fm) = &e.fixed_m {
            if fm.count == 0 || fm.m_values.is_empty() || fm.n_values.is_empty() || fm.n_values.contains(&0) {
                return fail("ensembles.fixed_m needs positive count and nonempty m_values/n_values".into());
            }
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        if self.solver.repeats == 0 {
            return fail("solver.repeats must be at least 1".into());
        }
        let a = &self.anneal;
        if a.reads == 0 || a.sweeps == 0 {
            return fail("anneal.reads and anneal.sweeps must be at least 1".into());
        }
        if !(a.beta_initial > 0.0 && a.beta_final >= a.beta_initial) {
            return fail("anneal betas need 0 < beta_initial <= beta_final".into());
        }
        if !(a.t_f_ms.is_finite() && a.t_f_ms > 0.0) {
            return fail("anneal.t_f_ms must be positive".into());
        }
        if !(a.noise_sigma_h >= 0.0 && a.noise_sigma_j >= 0.0) {
            return fail("noise sigmas must be non-negative".into());
        }
        let s = &self.analysis;
        if !(s.p_desired > 0.0 && s.p_desired < 1.0) {
            return fail("analysis.p_desired must lie in (0, 1)".into());
        }
        if !(0.0 < s.window_low && s.window_low < s.window_high && s.window_high < 1.0) {
            return fail("analysis window thresholds need 0 < window_low < window_high < 1".into());
        }
        if s.percentiles.is_empty() || s.percentiles.iter().any(|q| !(*q > 0.0 && *q <= 1.0)) {
            return fail("analysis.percentiles must lie in (0, 1]".into());
        }
        if s.collapse_grid.is_empty() {
            return fail("analysis.collapse_grid must be nonempty".into());
        }
        if s.density_bins.0 == 0 || s.density_bins.1 == 0 {
            return fail("analysis.density_bins must be at least 1 per axis".into());
        }
        Ok(())
    }
}
