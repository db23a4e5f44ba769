//! Chimera connectivity graphs with inactive-qubit masks, variable
//! placement, and the clause-capacity bounds of a hardware subgraph.
//!
//! Qubit `q` lives in unit cell `q / 8` (cells numbered row-major) at
//! position `k = q % 8`. Positions `0..4` and `4..8` form the two sides of
//! the cell's complete bipartite graph K_{4,4}. Side-0 qubits couple to the
//! same position in the cell below, side-1 qubits to the cell on the right.

use std::collections::BTreeSet;
use std::io::{self, Write};

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

pub const CELL_SIZE: usize = 8;
const HALF: usize = CELL_SIZE / 2;

/// Active-qubit count of the default pseudo-hardware mask.
pub const PSEUDO_DW1_QUBITS: usize = 108;
/// Coupler count of the default pseudo-hardware mask.
pub const PSEUDO_DW1_EDGES: usize = 255;
const PSEUDO_DW1_SEED: u64 = 0x0d_0001;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("mask has {got} entries, a {rows}x{cols} Chimera graph has {expected} qubits")]
    MaskLength {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("qubit {qubit} is out of range ({total} qubits)")]
    QubitOutOfRange { qubit: usize, total: usize },
    #[error("qubit {qubit} is inactive")]
    InactiveQubit { qubit: usize },
    #[error("requested {requested} variables but only {available} qubits are active")]
    TooManyVariables { requested: usize, available: usize },
    #[error("qubit subset is empty")]
    EmptySubset,
}

/// On-disk mask description: grid dimensions plus the list of dead qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFile {
    pub rows: usize,
    pub cols: usize,
    pub inactive: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraGraph {
    rows: usize,
    cols: usize,
    active: Vec<bool>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl ChimeraGraph {
    pub fn build(rows: usize, cols: usize, mask: &[bool]) -> Result<Self, GraphError> {
        let total = rows * cols * CELL_SIZE;
        if mask.len() != total {
            return Err(GraphError::MaskLength {
                rows,
                cols,
                expected: total,
                got: mask.len(),
            });
        }
        let mut edges = Vec::new();
        let mut push = |a: usize, b: usize| {
            if mask[a] && mask[b] {
                edges.push((a.min(b), a.max(b)));
            }
        };
        for r in 0..rows {
            for c in 0..cols {
                let base = (r * cols + c) * CELL_SIZE;
                for i in 0..HALF {
                    for j in HALF..CELL_SIZE {
                        push(base + i, base + j);
                    }
                }
                if r + 1 < rows {
                    let below = ((r + 1) * cols + c) * CELL_SIZE;
                    for i in 0..HALF {
                        push(base + i, below + i);
                    }
                }
                if c + 1 < cols {
                    let right = (r * cols + c + 1) * CELL_SIZE;
                    for j in HALF..CELL_SIZE {
                        push(base + j, right + j);
                    }
                }
            }
        }
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); total];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(ChimeraGraph {
            rows,
            cols,
            active: mask.to_vec(),
            edges,
            adjacency,
        })
    }

    /// Fully working graph.
    pub fn ideal(rows: usize, cols: usize) -> Self {
        Self::build(rows, cols, &vec![true; rows * cols * CELL_SIZE]).expect("mask length matches")
    }

    pub fn from_mask_file(mask: &MaskFile) -> Result<Self, GraphError> {
        let total = mask.rows * mask.cols * CELL_SIZE;
        let mut active = vec![true; total];
        for &q in &mask.inactive {
            if q >= total {
                return Err(GraphError::QubitOutOfRange { qubit: q, total });
            }
            active[q] = false;
        }
        Self::build(mask.rows, mask.cols, &active)
    }

    pub fn to_mask_file(&self) -> MaskFile {
        MaskFile {
            rows: self.rows,
            cols: self.cols,
            inactive: (0..self.num_qubits()).filter(|&q| !self.active[q]).collect(),
        }
    }

    /// Default 4x4 mask with 20 dead qubits, 108 active qubits and 255
    /// couplers. The dead set is the first seeded draw of 20 qubits that
    /// leaves exactly 255 couplers.
    pub fn pseudo_dw1() -> Self {
        let total = 4 * 4 * CELL_SIZE;
        for attempt in 0u64.. {
            let mut rng = seed::rng(seed::derive(PSEUDO_DW1_SEED, attempt));
            let mut active = vec![true; total];
            for q in index::sample(&mut rng, total, total - PSEUDO_DW1_QUBITS) {
                active[q] = false;
            }
            let g = Self::build(4, 4, &active).expect("mask length matches");
            if g.num_edges() == PSEUDO_DW1_EDGES {
                return g;
            }
        }
        unreachable!()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.active.get(q).copied().unwrap_or(false)
    }

    pub fn active_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| self.active[q]).collect()
    }

    pub fn num_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits() && self.adjacency[a].binary_search(&b).is_ok()
    }

    fn check_subset(&self, subset: &[usize]) -> Result<(), GraphError> {
        if subset.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        for &q in subset {
            if q >= self.num_qubits() {
                return Err(GraphError::QubitOutOfRange {
                    qubit: q,
                    total: self.num_qubits(),
                });
            }
            if !self.active[q] {
                return Err(GraphError::InactiveQubit { qubit: q });
            }
        }
        Ok(())
    }

    /// Edges with both endpoints in `subset`, as pairs of positions within
    /// `subset` (i.e. variable indices), lower index first, sorted.
    pub fn internal_edges(&self, subset: &[usize]) -> Vec<(usize, usize)> {
        let mut position = vec![usize::MAX; self.num_qubits()];
        for (i, &q) in subset.iter().enumerate() {
            position[q] = i;
        }
        let mut out: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let (pa, pb) = (position[a], position[b]);
                (pa != usize::MAX && pb != usize::MAX).then(|| (pa.min(pb), pa.max(pb)))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn capacity(&self, subset: &[usize]) -> Result<ClauseCapacity, GraphError> {
        self.check_subset(subset)?;
        Ok(ClauseCapacity {
            n: subset.len(),
            c: self.internal_edges(subset).len(),
        })
    }

    /// Picks `n` active qubits to host the formula's variables. The result is
    /// sorted by qubit index; variable `i` lives on `result[i]`.
    pub fn select_variables(&self, n: usize, policy: SelectionPolicy) -> Result<Vec<usize>, GraphError> {
        let active = self.active_qubits();
        if n > active.len() {
            return Err(GraphError::TooManyVariables {
                requested: n,
                available: active.len(),
            });
        }
        match policy {
            SelectionPolicy::CellMajorPrefix => Ok(active[..n].to_vec()),
            SelectionPolicy::Random { seed } => Ok(self.random_connected(&active, n, seed)),
        }
    }

    fn random_connected(&self, active: &[usize], n: usize, seed_value: u64) -> Vec<usize> {
        let mut rng = seed::rng(seed_value);
        let mut chosen = BTreeSet::new();
        let mut frontier = BTreeSet::new();
        while chosen.len() < n {
            let next = if frontier.is_empty() {
                // start (or restart, for a disconnected mask) from a fresh qubit
                let remaining: Vec<usize> = active.iter().copied().filter(|q| !chosen.contains(q)).collect();
                remaining[rng.random_range(0..remaining.len())]
            } else {
                let k = rng.random_range(0..frontier.len());
                *frontier.iter().nth(k).expect("k < len")
            };
            frontier.remove(&next);
            chosen.insert(next);
            for &nb in self.neighbors(next) {
                if !chosen.contains(&nb) {
                    frontier.insert(nb);
                }
            }
        }
        chosen.into_iter().collect()
    }

    /// Writes the coupler list as CSV with header `qubit_a,qubit_b`.
    pub fn write_edge_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "qubit_a,qubit_b")?;
        for &(a, b) in &self.edges {
            writeln!(out, "{a},{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum SelectionPolicy {
    #[default]
    CellMajorPrefix,
    Random {
        seed: u64,
    },
}

/// Variable count `n` and internal coupler count `c` of a qubit subset.
///
/// Each coupler supports exactly four distinct clauses, so at most `4c`
/// clauses fit. Once more than `3c` clauses are placed, some coupler carries
/// all four negation patterns and the formula cannot be satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseCapacity {
    pub n: usize,
    pub c: usize,
}

impl ClauseCapacity {
    pub fn max_clauses(&self) -> usize {
        4 * self.c
    }

    /// `4c / n`.
    pub fn max_density(&self) -> f64 {
        4.0 * self.c as f64 / self.n as f64
    }

    /// `(3c/n, 4c/n]`: densities at which every formula is UNSAT.
    pub fn unsat_band(&self) -> (f64, f64) {
        (3.0 * self.c as f64 / self.n as f64, self.max_density())
    }

    /// Exact integer form of the band test for a clause count `m`.
    pub fn forces_unsat(&self, m: usize) -> bool {
        3 * self.c < m && m <= 4 * self.c
    }
}

pub fn max_clause_density(g: &ChimeraGraph, subset: &[usize]) -> Result<f64, GraphError> {
    Ok(g.capacity(subset)?.max_density())
}

pub fn unsat_band(g: &ChimeraGraph, subset: &[usize]) -> Result<(f64, f64), GraphError> {
    Ok(g.capacity(subset)?.unsat_band())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent edge count: test every qubit pair against the coupling rule.
    fn brute_edge_count(rows: usize, cols: usize) -> usize {
        let coupled = |a: usize, b: usize| {
            let (ca, ka) = (a / 8, a % 8);
            let (cb, kb) = (b / 8, b % 8);
            let (ra, cola) = (ca / cols, ca % cols);
            let (rb, colb) = (cb / cols, cb % cols);
            if ca == cb {
                return (ka < 4) != (kb < 4);
            }
            if ka != kb {
                return false;
            }
            if ka < 4 {
                cola == colb && ra.abs_diff(rb) == 1
            } else {
                ra == rb && cola.abs_diff(colb) == 1
            }
        };
        let total = rows * cols * 8;
        let mut count = 0;
        for a in 0..total {
            for b in a + 1..total {
                if coupled(a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn edge_counts() {
        assert_eq!(ChimeraGraph::ideal(1, 1).num_edges(), 16);
        let g = ChimeraGraph::ideal(4, 4);
        assert_eq!(brute_edge_count(4, 4), 352);
        assert_eq!(g.num_edges(), 352);
        assert_eq!(g.max_degree(), 6);
        assert_eq!(ChimeraGraph::ideal(2, 3).num_edges(), brute_edge_count(2, 3));
    }

    #[test]
    fn edges_symmetric_irreflexive_active() {
        let g = ChimeraGraph::pseudo_dw1();
        for &(a, b) in g.edges() {
            assert!(a < b);
            assert!(g.is_active(a) && g.is_active(b));
            assert!(g.has_edge(a, b) && g.has_edge(b, a));
        }
    }

    #[test]
    fn pseudo_dw1_scale() {
        let g = ChimeraGraph::pseudo_dw1();
        assert_eq!(g.num_active(), 108);
        assert_eq!(g.num_edges(), 255);
        let cap = g.capacity(&g.active_qubits()).unwrap();
        assert_eq!(cap, ClauseCapacity { n: 108, c: 255 });
        assert!((cap.max_density() - 1020.0 / 108.0).abs() < 1e-12);
        let (lo, hi) = cap.unsat_band();
        assert!((lo - 255.0 * 3.0 / 108.0).abs() < 1e-12);
        assert!((hi - 255.0 * 4.0 / 108.0).abs() < 1e-12);
        // mask file round trip
        let back = ChimeraGraph::from_mask_file(&g.to_mask_file()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn mask_errors() {
        assert!(matches!(
            ChimeraGraph::build(2, 2, &[true; 10]),
            Err(GraphError::MaskLength { expected: 32, got: 10, .. })
        ));
        let bad = MaskFile {
            rows: 1,
            cols: 1,
            inactive: vec![8],
        };
        assert!(matches!(ChimeraGraph::from_mask_file(&bad), Err(GraphError::QubitOutOfRange { .. })));
    }

    #[test]
    fn capacity_values() {
        let g = ChimeraGraph::ideal(1, 1);
        let cap = g.capacity(&[0, 4]).unwrap();
        assert_eq!(cap, ClauseCapacity { n: 2, c: 1 });
        assert_eq!(cap.max_density(), 2.0);
        assert_eq!(cap.unsat_band(), (1.5, 2.0));
        assert!(cap.forces_unsat(4) && !cap.forces_unsat(3) && !cap.forces_unsat(5));
        let full = ChimeraGraph::ideal(4, 4);
        assert_eq!(max_clause_density(&full, &full.active_qubits()).unwrap(), 11.0);
        // no internal couplers: empty band, nothing can be generated
        let cap0 = g.capacity(&[0, 1]).unwrap();
        assert_eq!(cap0.unsat_band(), (0.0, 0.0));
        assert_eq!(cap0.max_clauses(), 0);
        assert_eq!(g.capacity(&[]).unwrap_err(), GraphError::EmptySubset);
        let mut mask = vec![true; 8];
        mask[3] = false;
        let dead = ChimeraGraph::build(1, 1, &mask).unwrap();
        assert_eq!(unsat_band(&dead, &[3]).unwrap_err(), GraphError::InactiveQubit { qubit: 3 });
    }

    #[test]
    fn cell_major_prefix_selection() {
        let g = ChimeraGraph::ideal(4, 4);
        assert_eq!(g.select_variables(128, SelectionPolicy::CellMajorPrefix).unwrap(), (0..128).collect::<Vec<_>>());
        let two_cells = g.select_variables(16, SelectionPolicy::CellMajorPrefix).unwrap();
        assert_eq!(two_cells, (0..16).collect::<Vec<_>>());
        // two K_{4,4} cells plus the 4 horizontal couplers joining them
        assert_eq!(g.capacity(&two_cells).unwrap().c, 2 * 16 + 4);
        assert!(matches!(
            g.select_variables(129, SelectionPolicy::CellMajorPrefix),
            Err(GraphError::TooManyVariables { .. })
        ));
    }

    #[test]
    fn random_selection_is_seeded_and_connected() {
        let g = ChimeraGraph::pseudo_dw1();
        let a = g.select_variables(8, SelectionPolicy::Random { seed: 3 }).unwrap();
        let b = g.select_variables(8, SelectionPolicy::Random { seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert!(a.iter().all(|&q| g.is_active(q)));
        assert!(g.capacity(&a).unwrap().c >= 7);
    }

    #[test]
    fn nested_subsets_have_monotone_edge_counts() {
        let g = ChimeraGraph::ideal(4, 4);
        let mut prev = 0;
        for n in 1..=128 {
            let s = g.select_variables(n, SelectionPolicy::CellMajorPrefix).unwrap();
            let c = g.capacity(&s).unwrap().c;
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn edge_csv() {
        let mut buf = Vec::new();
        ChimeraGraph::ideal(1, 1).write_edge_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("qubit_a,qubit_b\n0,4\n"));
        assert_eq!(text.lines().count(), 17);
    }
}
