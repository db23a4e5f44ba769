use std::collections::BTreeMap;
use std::time::Duration;

use max2sat_core::analysis::{self, CollapseForm, FitForm, FitPoint, WindowResult};
use max2sat_core::anneal::{run_instance, AnnealConfig, AnnealSchedule};
use max2sat_core::chimera::{ChimeraGraph, SelectionPolicy};
use max2sat_core::ensemble::{EnsembleSpec, Subgraph};
use max2sat_core::exact::{self, SolveResult};
use max2sat_core::formula::{Assignment, Formula};
use max2sat_core::ising::{self, ControlErrorModel, IsingProblem, SpinConfiguration};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A 2-CNF formula over variables 0..n.
#[pyclass(name = "Formula", module = "max2sat", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFormula {
    inner: Formula,
}

#[pymethods]
impl PyFormula {
    /// Builds a formula from DIMACS literal pairs such as `[[1, -2], [2, 3]]`.
    #[new]
    fn new(n: usize, clauses: Vec<[i64; 2]>) -> PyResult<Self> {
        Formula::from_dimacs_pairs(n, &clauses)
            .map(|inner| PyFormula { inner })
            .map_err(value_error)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n_declared()
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.inner.num_clauses()
    }

    #[getter]
    fn clause_density(&self) -> f64 {
        self.inner.clause_density()
    }

    /// Clauses as DIMACS literal pairs.
    fn clauses(&self) -> Vec<[i64; 2]> {
        self.inner.to_dimacs_pairs()
    }

    /// Number of clauses violated by a truth assignment.
    fn count_violations(&self, assignment: Vec<bool>) -> PyResult<usize> {
        self.inner
            .count_violations(&Assignment::from_values(assignment))
            .map_err(value_error)
    }

    fn __len__(&self) -> usize {
        self.inner.num_clauses()
    }

    fn __repr__(&self) -> String {
        format!("Formula(n={}, m={})", self.inner.n_declared(), self.inner.num_clauses())
    }
}

/// Fields and couplers of an Ising Hamiltonian.
#[pyclass(name = "IsingProblem", module = "max2sat", frozen)]
pub struct PyIsingProblem {
    inner: IsingProblem,
}

#[pymethods]
impl PyIsingProblem {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h().to_vec()
    }

    /// Couplers keyed by `(a, b)` with `a < b`.
    #[getter]
    fn couplers(&self) -> BTreeMap<(usize, usize), f64> {
        self.inner.couplers().clone()
    }

    #[getter]
    fn scale_factor(&self) -> f64 {
        self.inner.scale_factor()
    }

    /// Energy of a configuration of ±1 spins.
    fn energy(&self, spins: Vec<i8>) -> PyResult<f64> {
        self.inner.energy(&SpinConfiguration::new(spins)).map_err(value_error)
    }

    /// Clause violations implied by an energy of this problem.
    fn violations_from_energy(&self, energy: f64) -> f64 {
        self.inner.violations_from_energy(energy)
    }

    /// Copy rescaled into the hardware ranges |h| ≤ 2, |J| ≤ 1.
    fn autoscale(&self) -> Self {
        PyIsingProblem {
            inner: self.inner.autoscale(),
        }
    }

    fn __repr__(&self) -> String {
        format!("IsingProblem(n={}, couplers={})", self.inner.n(), self.inner.couplers().len())
    }
}

/// Outcome of an exact solve.
#[pyclass(name = "SolveResult", module = "max2sat", frozen, get_all)]
pub struct PySolveResult {
    optimum: usize,
    assignment: Vec<bool>,
    nodes_expanded: u64,
    elapsed_s: f64,
    optimal: bool,
}

impl From<SolveResult> for PySolveResult {
    fn from(r: SolveResult) -> Self {
        PySolveResult {
            optimum: r.optimum,
            assignment: r.assignment.values().to_vec(),
            nodes_expanded: r.nodes_expanded,
            elapsed_s: r.elapsed.as_secs_f64(),
            optimal: r.optimal,
        }
    }
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(optimum={}, optimal={}, nodes_expanded={})",
            self.optimum, self.optimal, self.nodes_expanded
        )
    }
}

/// Chimera hardware graph.
#[pyclass(name = "ChimeraGraph", module = "max2sat", frozen)]
pub struct PyChimeraGraph {
    inner: ChimeraGraph,
}

#[pymethods]
impl PyChimeraGraph {
    /// Full `rows × cols` grid of 8-qubit cells.
    #[staticmethod]
    fn ideal(rows: usize, cols: usize) -> Self {
        PyChimeraGraph {
            inner: ChimeraGraph::ideal(rows, cols),
        }
    }

    /// The 108-qubit, 255-coupler default working graph.
    #[staticmethod]
    fn pseudo_dw1() -> Self {
        PyChimeraGraph {
            inner: ChimeraGraph::pseudo_dw1(),
        }
    }

    #[getter]
    fn num_active(&self) -> usize {
        self.inner.num_active()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    /// `(n, c)`: variables and internal couplers of a qubit subset.
    fn capacity(&self, qubits: Vec<usize>) -> PyResult<(usize, usize)> {
        let cap = self.inner.capacity(&qubits).map_err(value_error)?;
        Ok((cap.n, cap.c))
    }

    /// First `n` active qubits in cell-major order, or a random connected
    /// subset when `seed` is given.
    #[pyo3(signature = (n, seed=None))]
    fn select(&self, n: usize, seed: Option<u64>) -> PyResult<Vec<usize>> {
        let policy = seed.map_or(SelectionPolicy::CellMajorPrefix, |seed| SelectionPolicy::Random { seed });
        self.inner.select_variables(n, policy).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "ChimeraGraph({}x{}, qubits={}, edges={})",
            self.inner.rows(),
            self.inner.cols(),
            self.inner.num_active(),
            self.inner.num_edges()
        )
    }
}

/// Ising image of a formula: energy = 4·violations − M, TRUE ↦ +1.
#[pyfunction]
fn map_formula(formula: &PyFormula) -> PyIsingProblem {
    PyIsingProblem {
        inner: ising::map_formula(&formula.inner),
    }
}

#[pyfunction]
#[pyo3(signature = (formula, budget_ms=None))]
fn branch_and_bound(py: Python<'_>, formula: &PyFormula, budget_ms: Option<u64>) -> PySolveResult {
    let f = formula.inner.clone();
    py.detach(move || exact::branch_and_bound(&f, budget_ms.map(Duration::from_millis)))
        .into()
}

#[pyfunction]
fn brute_force(formula: &PyFormula) -> PyResult<PySolveResult> {
    exact::brute_force(&formula.inner).map(Into::into).map_err(value_error)
}

/// Uniform random formulas with `round(alpha·n)` distinct clauses.
#[pyfunction]
fn random_ensemble(n: usize, alpha: f64, count: usize, seed: u64) -> PyResult<Vec<PyFormula>> {
    let spec = EnsembleSpec::random(n, alpha, count, seed);
    let formulas = spec
        .generate()
        .map_err(value_error)?
        .map(|i| PyFormula { inner: i.formula })
        .collect();
    Ok(formulas)
}

/// Formulas whose clauses lie on couplers of the first `n` cell-major
/// qubits of `graph` (the default working graph when omitted).
#[pyfunction]
#[pyo3(signature = (n, alpha, count, seed, graph=None))]
fn chimera_ensemble(n: usize, alpha: f64, count: usize, seed: u64, graph: Option<&PyChimeraGraph>) -> PyResult<Vec<PyFormula>> {
    let default;
    let g = match graph {
        Some(g) => &g.inner,
        None => {
            default = ChimeraGraph::pseudo_dw1();
            &default
        }
    };
    let sub = Subgraph::select(g, n, SelectionPolicy::CellMajorPrefix).map_err(value_error)?;
    let spec = EnsembleSpec::chimera(sub, alpha, count, seed);
    let formulas = spec
        .generate()
        .map_err(value_error)?
        .map(|i| PyFormula { inner: i.formula })
        .collect();
    Ok(formulas)
}

/// Simulated annealing reads on one formula. Returns a dict with
/// `p_success` (when `optimum` is given), `successes`, `reads` and the
/// final violation count of every read.
#[pyfunction]
#[pyo3(signature = (formula, optimum=None, reads=100, sweeps=1000, beta_initial=0.1, beta_final=5.0, noise_sigma_h=0.0, noise_sigma_j=0.0, seed=0))]
#[allow(clippy::too_many_arguments)]
fn anneal<'py>(
    py: Python<'py>,
    formula: &PyFormula,
    optimum: Option<usize>,
    reads: usize,
    sweeps: usize,
    beta_initial: f64,
    beta_final: f64,
    noise_sigma_h: f64,
    noise_sigma_j: f64,
    seed: u64,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    if sweeps == 0 || !(beta_initial > 0.0 && beta_initial <= beta_final) {
        return Err(PyValueError::new_err("need sweeps >= 1 and 0 < beta_initial <= beta_final"));
    }
    if noise_sigma_h < 0.0 || noise_sigma_j < 0.0 {
        return Err(PyValueError::new_err("noise sigmas must be non-negative"));
    }
    let cfg = AnnealConfig {
        schedule: AnnealSchedule::new(sweeps, beta_initial, beta_final),
        reads,
        noise: (noise_sigma_h > 0.0 || noise_sigma_j > 0.0).then(|| ControlErrorModel::new(noise_sigma_h, noise_sigma_j, seed)),
        ..AnnealConfig::default()
    };
    let f = formula.inner.clone();
    let stats = py.detach(move || run_instance(&f, optimum, &cfg, seed)).map_err(value_error)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("reads", stats.reads)?;
    out.set_item("successes", stats.successes)?;
    out.set_item("p_success", optimum.map(|_| stats.p_success))?;
    out.set_item("violations", stats.violations_per_read)?;
    out.set_item("cpu_time_s", stats.cpu_time.as_secs_f64())?;
    Ok(out)
}

/// `(k, t_soln_seconds)`: repetitions and time to reach the ground state
/// with probability `p_desired`; both `None` when `p == 0`.
#[pyfunction]
#[pyo3(signature = (p, p_desired=0.99, t_f_s=1e-3))]
fn tts(p: f64, p_desired: f64, t_f_s: f64) -> PyResult<(Option<u64>, Option<f64>)> {
    if !(t_f_s.is_finite() && t_f_s >= 0.0) {
        return Err(PyValueError::new_err("t_f_s must be a non-negative number"));
    }
    let r = analysis::tts(p, p_desired, Duration::from_secs_f64(t_f_s)).map_err(value_error)?;
    Ok((r.k.finite(), r.t_soln.map(|d| d.as_secs_f64())))
}

/// Spearman rank correlation, or `None` when a side is constant.
#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<f64>> {
    Ok(analysis::rank_correlation(&x, &y).map_err(value_error)?.spearman.value())
}

/// `(left, right, width)` of the interval where a decreasing P(SAT) curve
/// falls from `high` to `low`, or `None` if the curve never brackets it.
#[pyfunction]
#[pyo3(signature = (curve, high=0.98, low=0.3))]
fn scaling_window(curve: Vec<(f64, f64)>, high: f64, low: f64) -> PyResult<Option<(f64, f64, f64)>> {
    Ok(match analysis::scaling_window(&curve, high, low).map_err(value_error)? {
        WindowResult::Defined(w) => Some((w.alpha_left, w.alpha_right, w.width)),
        WindowResult::Undefined { .. } => None,
    })
}

fn fit_form(name: &str) -> PyResult<FitForm> {
    match name {
        "probability" => Ok(FitForm::ProbAnsatz),
        "tts" => Ok(FitForm::TtsAnsatz),
        "tts_extended" => Ok(FitForm::TtsExtended),
        other => Err(PyValueError::new_err(format!(
            "unknown form {other:?}; expected probability, tts or tts_extended"
        ))),
    }
}

fn points(alpha: &[f64], n: &[f64], y: &[f64]) -> PyResult<Vec<FitPoint>> {
    if alpha.len() != n.len() || n.len() != y.len() {
        return Err(PyValueError::new_err("alpha, n and y must have equal lengths"));
    }
    Ok(alpha.iter().zip(n).zip(y).map(|((&a, &n), &y)| FitPoint::new(a, n, y)).collect())
}

/// Least-squares fit of `form` ("probability", "tts" or "tts_extended");
/// returns the parameters by name plus `r_squared`.
#[pyfunction]
#[pyo3(signature = (form, alpha, n, y, fixed=None))]
fn fit(
    form: &str,
    alpha: Vec<f64>,
    n: Vec<f64>,
    y: Vec<f64>,
    fixed: Option<BTreeMap<String, f64>>,
) -> PyResult<BTreeMap<String, f64>> {
    let form = fit_form(form)?;
    let data = points(&alpha, &n, &y)?;
    let fixed = fixed.unwrap_or_default();
    let fixed: Vec<(&str, f64)> = fixed.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    let m = analysis::fit(form, &data, &fixed).map_err(value_error)?;
    let mut out: BTreeMap<String, f64> = m.names.iter().cloned().zip(m.parameters.iter().copied()).collect();
    out.insert("r_squared".into(), m.r_squared);
    Ok(out)
}

/// Best exponent from a grid search collapsing `y(alpha, n)` curves; pass
/// `a` for the time-to-solution form, omit it for the probability form.
#[pyfunction]
#[pyo3(signature = (alpha, n, y, a=None, grid=None))]
fn data_collapse(alpha: Vec<f64>, n: Vec<f64>, y: Vec<f64>, a: Option<f64>, grid: Option<Vec<f64>>) -> PyResult<f64> {
    let data = points(&alpha, &n, &y)?;
    let form = a.map_or(CollapseForm::Probability, |a| CollapseForm::TimeToSolution { a });
    let grid = grid.unwrap_or_else(|| analysis::DEFAULT_EXPONENT_GRID.to_vec());
    Ok(analysis::data_collapse(&data, form, &grid).map_err(value_error)?.exponent)
}

#[pymodule]
fn max2sat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add_class::<PyIsingProblem>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyChimeraGraph>()?;
    m.add_function(wrap_pyfunction!(map_formula, m)?)?;
    m.add_function(wrap_pyfunction!(branch_and_bound, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(random_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(chimera_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(anneal, m)?)?;
    m.add_function(wrap_pyfunction!(tts, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_window, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(data_collapse, m)?)?;
    Ok(())
}
