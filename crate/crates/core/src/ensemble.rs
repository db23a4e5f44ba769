//! Random MAX 2-SAT ensembles.
//!
//! * `Random`: clauses drawn uniformly from all `4 * C(n, 2)` two-variable
//!   clauses.
//! * `Chimera`: clauses restricted to the couplers of a hardware subgraph.
//! * `FixedM`: a fixed clause count instead of a fixed density, over either
//!   universe.
//!
//! Clauses within an instance are distinct. Negations are chosen uniformly
//! over the four patterns of a variable pair. Instance `i` of a spec is
//! generated from the sub-seed `derive(spec.seed, i)` alone.

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::{ChimeraGraph, GraphError, SelectionPolicy};
use crate::formula::{Clause, Formula, Literal};
use crate::io::InstanceRecord;
use crate::seed;

/// Variable counts of the hardware-compatible grid.
pub const GRID_N_VALUES: [usize; 13] = [16, 24, 32, 39, 46, 53, 60, 67, 75, 80, 87, 98, 108];
pub const GRID_CHIMERA_COUNT: usize = 500;
pub const GRID_RANDOM_COUNT: usize = 1000;

/// Clause densities 0.1, 0.2, ..., 2.0.
pub fn grid_alpha_values() -> Vec<f64> {
    (1..=20).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error(
        "capacity exceeded: {requested} clauses requested over {n} variables but only {capacity} distinct \
         clauses exist (maximum clause density 4c/n = {max_density:.4})"
    )]
    CapacityExceeded {
        requested: usize,
        capacity: usize,
        n: usize,
        max_density: f64,
    },
    #[error("chimera ensemble needs a subgraph with {n} qubits")]
    MissingTopology { n: usize },
    #[error("subgraph hosts {got} variables, spec declares {n}")]
    TopologySize { n: usize, got: usize },
    #[error("instance count must be at least 1")]
    ZeroCount,
    #[error("invalid clause density {0}")]
    BadDensity(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Random,
    Chimera,
    FixedM,
}

impl EnsembleKind {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::Random => "random",
            EnsembleKind::Chimera => "chimera",
            EnsembleKind::FixedM => "fixed_m",
        }
    }
}

/// Qubits hosting the variables and the couplers among them, expressed as
/// variable-index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub qubits: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn new(g: &ChimeraGraph, qubits: Vec<usize>) -> Result<Self, GraphError> {
        g.capacity(&qubits)?;
        let edges = g.internal_edges(&qubits);
        Ok(Subgraph { qubits, edges })
    }

    pub fn select(g: &ChimeraGraph, n: usize, policy: SelectionPolicy) -> Result<Self, GraphError> {
        Self::new(g, g.select_variables(n, policy)?)
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    /// Nominal clause density; for `FixedM` this is `m / n`.
    pub alpha: f64,
    /// Clause count, only for `FixedM`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub count: usize,
    pub seed: u64,
    /// Required for `Chimera`; optional for `FixedM`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Subgraph>,
}

/// `round(alpha * n)`, halves rounded up.
pub fn clause_count_for(alpha: f64, n: usize) -> usize {
    // the small slack keeps products like 0.3 * 25 = 7.499999... at 7.5
    (alpha * n as f64 + 0.5 + 1e-9).floor() as usize
}

fn binomial2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl EnsembleSpec {
    pub fn random(n: usize, alpha: f64, count: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Random,
            n,
            alpha,
            m: None,
            count,
            seed,
            topology: None,
        }
    }

    pub fn chimera(topology: Subgraph, alpha: f64, count: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::Chimera,
            n: topology.n(),
            alpha,
            m: None,
            count,
            seed,
            topology: Some(topology),
        }
    }

    pub fn fixed_m(n: usize, m: usize, topology: Option<Subgraph>, count: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind: EnsembleKind::FixedM,
            n,
            alpha: if n == 0 { 0.0 } else { m as f64 / n as f64 },
            m: Some(m),
            count,
            seed,
            topology,
        }
    }

    pub fn clause_count(&self) -> usize {
        match (self.kind, self.m) {
            (EnsembleKind::FixedM, Some(m)) => m,
            _ => clause_count_for(self.alpha, self.n),
        }
    }

    fn restricted(&self) -> bool {
        self.topology.is_some() && self.kind != EnsembleKind::Random
    }

    /// Number of distinct clauses available.
    pub fn capacity(&self) -> usize {
        match &self.topology {
            Some(t) if self.restricted() => 4 * t.edges.len(),
            _ => 4 * binomial2(self.n),
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.count == 0 {
            return Err(EnsembleError::ZeroCount);
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(EnsembleError::BadDensity(self.alpha));
        }
        if self.kind == EnsembleKind::Chimera && self.topology.is_none() {
            return Err(EnsembleError::MissingTopology { n: self.n });
        }
        if let Some(t) = &self.topology {
            if self.restricted() && t.n() != self.n {
                return Err(EnsembleError::TopologySize { n: self.n, got: t.n() });
            }
        }
        let requested = self.clause_count();
        let capacity = self.capacity();
        if requested > capacity {
            return Err(EnsembleError::CapacityExceeded {
                requested,
                capacity,
                n: self.n,
                max_density: if self.n == 0 { 0.0 } else { capacity as f64 / self.n as f64 },
            });
        }
        Ok(())
    }

    /// Label used in instance ids and file names, e.g. `chimera_n16_a0.50`.
    pub fn label(&self) -> String {
        match self.kind {
            EnsembleKind::FixedM => format!(
                "{}{}_n{}_m{}",
                self.kind.label(),
                if self.topology.is_some() { "_chimera" } else { "" },
                self.n,
                self.clause_count()
            ),
            _ => format!("{}_n{}_a{:.2}", self.kind.label(), self.n, self.alpha),
        }
    }

    pub fn ensemble_name(&self) -> String {
        match (self.kind, &self.topology) {
            (EnsembleKind::FixedM, Some(_)) => "fixed_m_chimera".to_string(),
            (kind, _) => kind.label().to_string(),
        }
    }

    /// Variable pairs clauses may be placed on.
    fn pairs(&self) -> Vec<(usize, usize)> {
        match &self.topology {
            Some(t) if self.restricted() => t.edges.clone(),
            _ => (0..self.n).flat_map(|a| (a + 1..self.n).map(move |b| (a, b))).collect(),
        }
    }

    /// Generates instance `index`; `validate` must have passed.
    pub fn instance(&self, index: usize) -> Instance {
        self.instance_with_pairs(&self.pairs(), index)
    }

    fn instance_with_pairs(&self, pairs: &[(usize, usize)], index: usize) -> Instance {
        let sub_seed = seed::derive(self.seed, index as u64);
        let m = self.clause_count();
        let clauses = sample_clauses(pairs, m, sub_seed);
        let formula = Formula::new(self.n, clauses).expect("sampled clauses are distinct and in range");
        Instance {
            id: format!("{}_{:05}", self.label(), index),
            index,
            seed: sub_seed,
            alpha: self.alpha,
            ensemble: self.ensemble_name(),
            formula,
        }
    }

    /// Lazily generates all `count` instances.
    pub fn generate(&self) -> Result<impl Iterator<Item = Instance> + '_, EnsembleError> {
        self.validate()?;
        let pairs = self.pairs();
        Ok((0..self.count).map(move |i| self.instance_with_pairs(&pairs, i)))
    }
}

/// One generated formula with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub index: usize,
    pub seed: u64,
    pub alpha: f64,
    pub ensemble: String,
    pub formula: Formula,
}

impl Instance {
    pub fn realized_alpha(&self) -> f64 {
        self.formula.clause_density()
    }

    pub fn to_record(&self) -> InstanceRecord {
        InstanceRecord::new(self.id.clone(), self.seed, self.alpha, self.ensemble.clone(), &self.formula)
    }
}

fn decode_clause(pairs: &[(usize, usize)], code: usize) -> Clause {
    let (a, b) = pairs[code / 4];
    let pattern = code % 4;
    Clause::new(Literal::new(a, pattern & 1 == 1), Literal::new(b, pattern & 2 == 2)).expect("pair joins distinct variables")
}

/// Draws `m` distinct clauses from the universe `pairs x {4 negation patterns}`.
///
/// Rejection sampling below half the universe, a partial Fisher-Yates
/// shuffle of the whole universe above it.
fn sample_clauses(pairs: &[(usize, usize)], m: usize, sub_seed: u64) -> Vec<Clause> {
    let universe = 4 * pairs.len();
    debug_assert!(m <= universe);
    let mut rng = seed::rng(sub_seed);
    let codes: Vec<usize> = if 2 * m <= universe {
        let mut seen = HashSet::with_capacity(m);
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let pair = rng.random_range(0..pairs.len());
            let pattern = rng.random_range(0..4usize);
            let code = 4 * pair + pattern;
            if seen.insert(code) {
                out.push(code);
            }
        }
        out
    } else {
        let mut all: Vec<usize> = (0..universe).collect();
        for i in 0..m {
            let j = rng.random_range(i..universe);
            all.swap(i, j);
        }
        all.truncate(m);
        all
    };
    codes.into_iter().map(|c| decode_clause(pairs, c)).collect()
}

fn grid_seed(base: u64, kind: EnsembleKind, n: usize, alpha_index: usize) -> u64 {
    let tag = match kind {
        EnsembleKind::Random => 1u64,
        EnsembleKind::Chimera => 2,
        EnsembleKind::FixedM => 3,
    };
    seed::derive(seed::derive(seed::derive(base, tag), n as u64), alpha_index as u64)
}

/// The full hardware-compatible grid (13 sizes x 20 densities, 500
/// instances each) followed by the matching unrestricted grid (1000
/// instances each).
pub fn paper_grid(g: &ChimeraGraph, policy: SelectionPolicy, seed_value: u64) -> Result<Vec<EnsembleSpec>, EnsembleError> {
    grid(g, policy, seed_value, &GRID_N_VALUES, &grid_alpha_values(), GRID_CHIMERA_COUNT, GRID_RANDOM_COUNT)
}

/// Chimera specs for every `(n, alpha)` followed by random specs for every
/// `(n, alpha)`; a zero count skips that half.
pub fn grid(
    g: &ChimeraGraph,
    policy: SelectionPolicy,
    seed_value: u64,
    n_values: &[usize],
    alpha_values: &[f64],
    chimera_count: usize,
    random_count: usize,
) -> Result<Vec<EnsembleSpec>, EnsembleError> {
    let mut specs = Vec::new();
    if chimera_count > 0 {
        for &n in n_values {
            let topology = Subgraph::select(g, n, policy)?;
            for (ai, &alpha) in alpha_values.iter().enumerate() {
                let spec = EnsembleSpec::chimera(
                    topology.clone(),
                    alpha,
                    chimera_count,
                    grid_seed(seed_value, EnsembleKind::Chimera, n, ai),
                );
                spec.validate()?;
                specs.push(spec);
            }
        }
    }
    if random_count > 0 {
        for &n in n_values {
            for (ai, &alpha) in alpha_values.iter().enumerate() {
                let spec = EnsembleSpec::random(n, alpha, random_count, grid_seed(seed_value, EnsembleKind::Random, n, ai));
                spec.validate()?;
                specs.push(spec);
            }
        }
    }
    Ok(specs)
}

/// Fixed clause-count specs for every `(m, n)` pair; with a graph the
/// clauses are restricted to the selected subgraph.
pub fn fixed_m_grid(
    m_values: &[usize],
    n_values: &[usize],
    graph: Option<(&ChimeraGraph, SelectionPolicy)>,
    count: usize,
    seed_value: u64,
) -> Result<Vec<EnsembleSpec>, EnsembleError> {
    let mut specs = Vec::new();
    for &n in n_values {
        let topology = match graph {
            Some((g, policy)) => Some(Subgraph::select(g, n, policy)?),
            None => None,
        };
        for (mi, &m) in m_values.iter().enumerate() {
            let spec = EnsembleSpec::fixed_m(n, m, topology.clone(), count, grid_seed(seed_value, EnsembleKind::FixedM, n, mi));
            spec.validate()?;
            specs.push(spec);
        }
    }
    Ok(specs)
}
