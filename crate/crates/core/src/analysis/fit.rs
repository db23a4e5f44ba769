use argmin::core::{CostFunction, Error as ArgminError, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::seed;

/// One observation `y(α, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub alpha: f64,
    pub n: f64,
    pub y: f64,
}

impl FitPoint {
    pub fn new(alpha: f64, n: f64, y: f64) -> Self {
        FitPoint { alpha, n, y }
    }
}

/// Closed-form models for success probability and time to solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// `p = exp(-A α^γ N^δ)`
    ProbAnsatz,
    /// `T = A exp(B α^γ N^δ)`
    TtsAnsatz,
    /// `T = A exp(B α^γ N^δ) + C exp(D α^ζ) + E α + F`
    TtsExtended,
}

impl FitForm {
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FitForm::ProbAnsatz => &["A", "gamma", "delta"],
            FitForm::TtsAnsatz => &["A", "B", "gamma", "delta"],
            FitForm::TtsExtended => &["A", "B", "gamma", "delta", "C", "D", "zeta", "E", "F"],
        }
    }

    /// Boxes from which starting points are drawn log-uniformly.
    pub fn default_start_boxes(self) -> Vec<(f64, f64)> {
        match self {
            FitForm::ProbAnsatz => vec![(1e-7, 1e-1), (0.1, 5.0), (0.1, 3.0)],
            FitForm::TtsAnsatz => vec![(1e-3, 1e3), (1e-5, 1.0), (0.1, 3.0), (0.1, 3.0)],
            FitForm::TtsExtended => vec![
                (1e-3, 1e3),
                (1e-5, 1.0),
                (0.1, 3.0),
                (0.1, 3.0),
                (1e-3, 1e2),
                (1e-3, 10.0),
                (1e-3, 3.0),
                (1e-3, 10.0),
                (1e-4, 10.0),
            ],
        }
    }

    pub fn eval(self, params: &[f64], alpha: f64, n: f64) -> f64 {
        match self {
            FitForm::ProbAnsatz => (-params[0] * alpha.powf(params[1]) * n.powf(params[2])).exp(),
            FitForm::TtsAnsatz => params[0] * (params[1] * alpha.powf(params[2]) * n.powf(params[3])).exp(),
            FitForm::TtsExtended => {
                let p = params;
                p[0] * (p[1] * alpha.powf(p[2]) * n.powf(p[3])).exp()
                    + p[4] * (p[5] * alpha.powf(p[6])).exp()
                    + p[7] * alpha
                    + p[8]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub starts: usize,
    /// Approximate cap on objective evaluations per start.
    pub max_evals: u64,
    /// Stop when the spread of simplex costs falls below this fraction of
    /// the total sum of squares.
    pub tolerance: f64,
    pub seed: u64,
    /// Overrides the form's default starting boxes.
    pub start_boxes: Option<Vec<(f64, f64)>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            starts: 16,
            max_evals: 10_000,
            tolerance: 1e-8,
            seed: 0x05ee_df17,
            start_boxes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub form: FitForm,
    pub names: Vec<String>,
    pub parameters: Vec<f64>,
    pub fixed: Vec<bool>,
    pub r_squared: f64,
    pub ss_res: f64,
    /// False when no start met the tolerance; parameters are then the best
    /// found.
    pub converged: bool,
    pub evaluations: u64,
}

impl FitModel {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.parameters[i])
    }

    pub fn predict(&self, alpha: f64, n: f64) -> f64 {
        self.form.eval(&self.parameters, alpha, n)
    }
}

/// Coefficient of determination. With zero total variance a fit is perfect
/// (1) when its residual is negligible and uninformative (0) otherwise.
pub fn r_squared(ss_res: f64, ss_tot: f64) -> f64 {
    if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-20 {
        1.0
    } else {
        0.0
    }
}

fn sums_of_squares(form: FitForm, params: &[f64], data: &[FitPoint]) -> (f64, f64) {
    let mean = data.iter().map(|d| d.y).sum::<f64>() / data.len() as f64;
    let ss_tot = data.iter().map(|d| (d.y - mean).powi(2)).sum();
    (residual(form, params, data), ss_tot)
}

fn residual(form: FitForm, params: &[f64], data: &[FitPoint]) -> f64 {
    data.iter().map(|d| (d.y - form.eval(params, d.alpha, d.n)).powi(2)).sum()
}

struct Objective<'a> {
    form: FitForm,
    data: &'a [FitPoint],
    template: Vec<f64>,
    free: Vec<usize>,
}

impl Objective<'_> {
    fn full(&self, free_values: &[f64]) -> Vec<f64> {
        let mut p = self.template.clone();
        for (&i, &v) in self.free.iter().zip(free_values) {
            p[i] = v;
        }
        p
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, ArgminError> {
        let r = residual(self.form, &self.full(x), self.data);
        Ok(if r.is_finite() { r } else { f64::MAX / 16.0 })
    }
}

/// Least-squares fit with default options.
pub fn fit(form: FitForm, data: &[FitPoint], fixed: &[(&str, f64)]) -> Result<FitModel, AnalysisError> {
    fit_with(form, data, fixed, &FitOptions::default())
}

/// Multi-start simplex least squares on the free parameters; `fixed`
/// parameters keep their given values.
pub fn fit_with(form: FitForm, data: &[FitPoint], fixed: &[(&str, f64)], opts: &FitOptions) -> Result<FitModel, AnalysisError> {
    if data.is_empty() {
        return Err(AnalysisError::EmptyData);
    }
    let names = form.parameter_names();
    let mut template = vec![0.0; names.len()];
    let mut is_fixed = vec![false; names.len()];
    for &(name, value) in fixed {
        let i = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| AnalysisError::UnknownParameter(name.to_string()))?;
        template[i] = value;
        is_fixed[i] = true;
    }
    let free: Vec<usize> = (0..names.len()).filter(|&i| !is_fixed[i]).collect();
    let boxes = opts.start_boxes.clone().unwrap_or_else(|| form.default_start_boxes());
    let (_, ss_tot) = sums_of_squares(form, &template, data);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = free.is_empty();
    let mut evaluations = 0;
    let objective = || Objective {
        form,
        data,
        template: template.clone(),
        free: free.clone(),
    };
    if !free.is_empty() {
        let mut rng = seed::rng(opts.seed);
        let sd_tol = opts.tolerance * ss_tot.max(f64::MIN_POSITIVE);
        for start in 0..opts.starts.max(1) {
            let x0: Vec<f64> = free
                .iter()
                .map(|&i| {
                    let (lo, hi) = boxes[i];
                    let t = if start == 0 { 0.5 } else { rng.random::<f64>() };
                    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                })
                .collect();
            // polish once from where the first simplex collapsed
            let mut x = x0;
            for _ in 0..2 {
                let (xs, cost, reason, evals) = nelder_mead(objective(), &x, sd_tol, opts.max_evals);
                evaluations += evals;
                converged |= reason == TerminationReason::SolverConverged;
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, xs.clone()));
                }
                x = xs;
            }
        }
    }
    let parameters = match &best {
        Some((_, xs)) => objective().full(xs),
        None => template.clone(),
    };
    let ss_res = residual(form, &parameters, data);
    Ok(FitModel {
        form,
        names: names.iter().map(|s| s.to_string()).collect(),
        parameters,
        fixed: is_fixed,
        r_squared: r_squared(ss_res, ss_tot),
        ss_res,
        converged,
        evaluations,
    })
}

fn nelder_mead(obj: Objective<'_>, x0: &[f64], sd_tol: f64, max_evals: u64) -> (Vec<f64>, f64, TerminationReason, u64) {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] = if v[i] == 0.0 { 1e-3 } else { v[i] * 1.1 };
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(sd_tol)
        .expect("tolerance is non-negative");
    let res = Executor::new(obj, solver)
        .configure(|s| s.max_iters(max_evals / 2))
        .run()
        .expect("objective never fails");
    let state = res.state();
    let evals = state.get_func_counts().get("cost_count").copied().unwrap_or(0);
    (
        state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec()),
        state.get_best_cost(),
        state.get_termination_reason().cloned().unwrap_or(TerminationReason::MaxItersReached),
        evals,
    )
}
