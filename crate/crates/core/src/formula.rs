//! MAX 2-SAT data model: literals, two-literal clauses, formulas and
//! assignments.
//!
//! Variables are 0-indexed. Truth values follow the binary convention
//! TRUE=0, FALSE=1 when exposed as bits, which is also the convention used by
//! the spin mapping `s = (-1)^x`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or evaluating formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("clause pairs variable {var} with itself")]
    SelfPairedClause { var: usize },
    #[error("variable {var} is out of range for a formula over {n} variables")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("clause {index} duplicates an earlier clause ({clause})")]
    DuplicateClause { index: usize, clause: Clause },
    #[error("assignment has length {got}, formula declares {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("literal 0 is not a valid DIMACS literal")]
    ZeroLiteral,
}

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: usize, negated: bool) -> Self {
        Literal {
            var: var as u32,
            negated,
        }
    }

    pub fn positive(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn negative(var: usize) -> Self {
        Self::new(var, true)
    }

    #[inline]
    pub fn var(self) -> usize {
        self.var as usize
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.negated
    }

    #[inline]
    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// `+1` for an unnegated literal, `-1` for a negated one.
    #[inline]
    pub fn sign(self) -> i32 {
        if self.negated {
            -1
        } else {
            1
        }
    }

    /// Evaluates the literal given the truth value of its variable.
    #[inline]
    pub fn holds(self, value: bool) -> bool {
        value != self.negated
    }

    /// Dense code `2*var + negated`, handy for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        2 * self.var as usize + self.negated as usize
    }

    pub fn from_code(code: usize) -> Self {
        Literal::new(code / 2, code % 2 == 1)
    }

    /// Parses a signed 1-indexed DIMACS literal.
    pub fn from_dimacs(lit: i64) -> Result<Self, FormulaError> {
        if lit == 0 {
            return Err(FormulaError::ZeroLiteral);
        }
        Ok(Literal::new(lit.unsigned_abs() as usize - 1, lit < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var + 1)
        } else {
            write!(f, "x{}", self.var + 1)
        }
    }
}

/// A logical OR of two literals over distinct variables, stored with the
/// lower variable index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clause {
    first: Literal,
    second: Literal,
}

impl Clause {
    pub fn new(a: Literal, b: Literal) -> Result<Self, FormulaError> {
        if a.var == b.var {
            return Err(FormulaError::SelfPairedClause { var: a.var() });
        }
        let (first, second) = if a.var < b.var { (a, b) } else { (b, a) };
        Ok(Clause { first, second })
    }

    pub fn first(&self) -> Literal {
        self.first
    }

    pub fn second(&self) -> Literal {
        self.second
    }

    pub fn literals(&self) -> [Literal; 2] {
        [self.first, self.second]
    }

    /// True when both literals evaluate FALSE.
    #[inline]
    pub fn is_violated_by(&self, a: &Assignment) -> bool {
        !self.first.holds(a.value(self.first.var())) && !self.second.holds(a.value(self.second.var()))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ∨ {})", self.first, self.second)
    }
}

/// A conjunction of distinct two-literal clauses over `n_declared` variables.
///
/// `n_declared` is the ensemble's N and is kept even when some variables do
/// not occur in any clause, so that `clause_density` stays `M / N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        let mut seen = HashSet::with_capacity(clauses.len());
        for (index, clause) in clauses.iter().enumerate() {
            for lit in clause.literals() {
                if lit.var() >= n {
                    return Err(FormulaError::VariableOutOfRange { var: lit.var(), n });
                }
            }
            if !seen.insert(*clause) {
                return Err(FormulaError::DuplicateClause {
                    index,
                    clause: *clause,
                });
            }
        }
        Ok(Formula { n, clauses })
    }

    pub fn empty(n: usize) -> Self {
        Formula { n, clauses: vec![] }
    }

    /// Builds a formula from signed 1-indexed literal pairs.
    pub fn from_dimacs_pairs(n: usize, pairs: &[[i64; 2]]) -> Result<Self, FormulaError> {
        let clauses = pairs
            .iter()
            .map(|[a, b]| Clause::new(Literal::from_dimacs(*a)?, Literal::from_dimacs(*b)?))
            .collect::<Result<Vec<_>, _>>()?;
        Formula::new(n, clauses)
    }

    pub fn to_dimacs_pairs(&self) -> Vec<[i64; 2]> {
        self.clauses
            .iter()
            .map(|c| [c.first.to_dimacs(), c.second.to_dimacs()])
            .collect()
    }

    pub fn n_declared(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Realized clause density `M / N` (0 for a formula over no variables).
    pub fn clause_density(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.clauses.len() as f64 / self.n as f64
        }
    }

    /// Mask of variables occurring in at least one clause.
    pub fn used_variables(&self) -> Vec<bool> {
        let mut used = vec![false; self.n];
        for c in &self.clauses {
            used[c.first.var()] = true;
            used[c.second.var()] = true;
        }
        used
    }

    pub fn num_used_variables(&self) -> usize {
        self.used_variables().iter().filter(|&&u| u).count()
    }

    fn check_len(&self, a: &Assignment) -> Result<(), FormulaError> {
        if a.len() != self.n {
            return Err(FormulaError::LengthMismatch {
                expected: self.n,
                got: a.len(),
            });
        }
        Ok(())
    }

    /// Number of clauses with both literals FALSE under `a`.
    pub fn count_violations(&self, a: &Assignment) -> Result<usize, FormulaError> {
        self.check_len(a)?;
        Ok(self.clauses.iter().filter(|c| c.is_violated_by(a)).count())
    }

    pub fn count_satisfied(&self, a: &Assignment) -> Result<usize, FormulaError> {
        Ok(self.clauses.len() - self.count_violations(a)?)
    }
}

/// `true` iff the exact minimum violation count is zero.
pub fn is_satisfiable(optimum: usize) -> bool {
    optimum == 0
}

/// Truth values for every declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn all_true(n: usize) -> Self {
        Assignment {
            values: vec![true; n],
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// From binary digits with TRUE=0 and FALSE=1.
    pub fn from_bits(bits: &[u8]) -> Self {
        Assignment {
            values: bits.iter().map(|&b| b == 0).collect(),
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.values.iter().map(|&v| u8::from(!v)).collect()
    }

    #[inline]
    pub fn value(&self, var: usize) -> bool {
        self.values[var]
    }

    #[inline]
    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
