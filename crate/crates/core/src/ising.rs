//! Ising images of MAX 2-SAT formulas.
//!
//! With `s_j = (-1)^{x_j}` (TRUE=0 -> +1) and `v = +1` for an unnegated and
//! `-1` for a negated literal, each clause contributes the penalty
//! `(1 - v_a s_a)(1 - v_b s_b) / 4`, which is 1 exactly when the clause is
//! violated. Multiplying by 4 and dropping the constant gives integer
//! couplings
//!
//! ```text
//! h_j  = -sum_k v_j^k
//! J_ab =  sum_k v_a^k v_b^k
//! ```
//!
//! and the identity `energy(s) = 4 * violations - M`.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Assignment, Formula};
use crate::seed;

/// Hardware field range `[-2, 2]`.
pub const H_RANGE: f64 = 2.0;
/// Hardware coupler range `[-1, 1]`.
pub const J_RANGE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum IsingError {
    #[error("spin configuration has length {got}, problem has {expected} spins")]
    LengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingProblem {
    n: usize,
    h: Vec<f64>,
    couplers: BTreeMap<(usize, usize), f64>,
    /// Constant dropped from the clause sum, in violation units (= M).
    offset: f64,
    /// Factor all fields were divided by during autoscale (1 if none).
    scale_factor: f64,
    /// Spins that carry any term; unused variables are not programmed.
    active: Vec<bool>,
    perturbed: bool,
}

impl IsingProblem {
    /// A problem with explicit fields; every spin is considered active.
    pub fn new(h: Vec<f64>, couplers: BTreeMap<(usize, usize), f64>) -> Self {
        let n = h.len();
        let couplers = couplers
            .into_iter()
            .map(|((a, b), v)| {
                assert!(a != b && a < n && b < n, "coupler ({a}, {b}) invalid for {n} spins");
                ((a.min(b), a.max(b)), v)
            })
            .collect();
        IsingProblem {
            n,
            h,
            couplers,
            offset: 0.0,
            scale_factor: 1.0,
            active: vec![true; n],
            perturbed: false,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0.0; n], BTreeMap::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplers(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplers
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.couplers.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    pub fn max_abs_h(&self) -> f64 {
        self.h.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_j(&self) -> f64 {
        self.couplers.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sum_j h_j s_j + sum_{a<b} J_ab s_a s_b`.
    pub fn energy(&self, s: &SpinConfiguration) -> Result<f64, IsingError> {
        if s.len() != self.n {
            return Err(IsingError::LengthMismatch {
                expected: self.n,
                got: s.len(),
            });
        }
        let spins = s.spins();
        let field: f64 = self.h.iter().zip(spins).map(|(h, &x)| h * x as f64).sum();
        let coupling: f64 = self
            .couplers
            .iter()
            .map(|(&(a, b), j)| j * (spins[a] * spins[b]) as f64)
            .sum();
        Ok(field + coupling)
    }

    /// Violations implied by an energy of this (possibly rescaled) problem.
    /// Only meaningful for unperturbed images of a formula.
    pub fn violations_from_energy(&self, energy: f64) -> f64 {
        (energy * self.scale_factor + self.offset) / 4.0
    }

    /// Divides every field by `max(|h|/2, |J|)` when that exceeds 1.
    pub fn autoscale(&self) -> IsingProblem {
        let factor = (self.max_abs_h() / H_RANGE).max(self.max_abs_j() / J_RANGE);
        let mut out = self.clone();
        if factor > 1.0 {
            out.h.iter_mut().for_each(|h| *h /= factor);
            out.couplers.values_mut().for_each(|j| *j /= factor);
            out.scale_factor = self.scale_factor * factor;
        }
        out
    }

    /// Adds independent Gaussian noise to each programmed field and coupler.
    /// Values are not clipped back into the hardware range.
    pub fn perturb(&self, model: &ControlErrorModel) -> IsingProblem {
        let mut out = self.clone();
        if model.sigma_h == 0.0 && model.sigma_j == 0.0 {
            return out;
        }
        let mut rng = seed::rng(model.seed);
        let h_noise = Normal::new(0.0, model.sigma_h).expect("sigma_h is finite and non-negative");
        let j_noise = Normal::new(0.0, model.sigma_j).expect("sigma_J is finite and non-negative");
        for (j, h) in out.h.iter_mut().enumerate() {
            if self.active[j] {
                *h += h_noise.sample(&mut rng);
            }
        }
        for v in out.couplers.values_mut() {
            *v += j_noise.sample(&mut rng);
        }
        out.perturbed = true;
        out
    }

    /// Text export: `n`, then `j h_j` for every spin, then `a b J_ab` for
    /// every coupler. Indices are 0-based.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.n)?;
        for (j, h) in self.h.iter().enumerate() {
            writeln!(out, "{j} {h}")?;
        }
        for (&(a, b), v) in &self.couplers {
            writeln!(out, "{a} {b} {v}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<IsingProblem, IsingError> {
        let mut lines = reader.lines().enumerate();
        let err = |line: usize, msg: &str| IsingError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (idx, first) = lines.next().ok_or_else(|| err(0, "empty input"))?;
        let n: usize = first?.trim().parse().map_err(|_| err(idx, "bad spin count"))?;
        let mut h = vec![0.0; n];
        let mut couplers = BTreeMap::new();
        for (idx, line) in lines {
            let line = line?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [] => continue,
                [j, v] => {
                    let j: usize = j.parse().map_err(|_| err(idx, "bad index"))?;
                    if j >= n {
                        return Err(err(idx, "index out of range"));
                    }
                    h[j] = v.parse().map_err(|_| err(idx, "bad field value"))?;
                }
                [a, b, v] => {
                    let a: usize = a.parse().map_err(|_| err(idx, "bad index"))?;
                    let b: usize = b.parse().map_err(|_| err(idx, "bad index"))?;
                    if a >= n || b >= n || a == b {
                        return Err(err(idx, "invalid coupler indices"));
                    }
                    couplers.insert((a.min(b), a.max(b)), v.parse().map_err(|_| err(idx, "bad coupler value"))?);
                }
                _ => return Err(err(idx, "expected 2 or 3 fields")),
            }
        }
        Ok(IsingProblem::new(h, couplers))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "h": self.h,
            "J": self.couplers.iter().map(|(&(a, b), v)| serde_json::json!([a, b, v])).collect::<Vec<_>>(),
            "offset": self.offset,
            "scale_factor": self.scale_factor,
        })
    }
}

/// Integer Ising image of `f`; see the module docs.
pub fn map_formula(f: &Formula) -> IsingProblem {
    let n = f.n_declared();
    let mut h = vec![0.0; n];
    let mut couplers: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for c in f.clauses() {
        let (a, b) = (c.first(), c.second());
        h[a.var()] -= a.sign() as f64;
        h[b.var()] -= b.sign() as f64;
        *couplers.entry((a.var(), b.var())).or_insert(0.0) += (a.sign() * b.sign()) as f64;
    }
    couplers.retain(|_, v| *v != 0.0);
    IsingProblem {
        n,
        h,
        couplers,
        offset: f.num_clauses() as f64,
        scale_factor: 1.0,
        active: f.used_variables(),
        perturbed: false,
    }
}

/// Gaussian control errors on programmed fields and couplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlErrorModel {
    pub sigma_h: f64,
    pub sigma_j: f64,
    pub seed: u64,
}

impl ControlErrorModel {
    pub fn new(sigma_h: f64, sigma_j: f64, seed: u64) -> Self {
        assert!(sigma_h >= 0.0 && sigma_j >= 0.0, "noise sigmas must be non-negative");
        ControlErrorModel { sigma_h, sigma_j, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ControlErrorModel { seed, ..self }
    }
}

impl Default for ControlErrorModel {
    fn default() -> Self {
        ControlErrorModel::new(0.1, 0.1, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(spins.iter().all(|&s| s == 1 || s == -1), "spins must be +-1");
        SpinConfiguration { spins }
    }

    pub fn all_up(n: usize) -> Self {
        SpinConfiguration { spins: vec![1; n] }
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn flip(&mut self, j: usize) {
        self.spins[j] = -self.spins[j];
    }
}

/// TRUE -> +1, FALSE -> -1.
pub fn encode(a: &Assignment) -> SpinConfiguration {
    SpinConfiguration {
        spins: a.values().iter().map(|&v| if v { 1 } else { -1 }).collect(),
    }
}

pub fn decode(s: &SpinConfiguration) -> Assignment {
    Assignment::from_values(s.spins.iter().map(|&x| x == 1).collect())
}
