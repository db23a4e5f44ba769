//! JSON Lines instance files: one instance object per line,
//! `{id, seed, n, alpha, ensemble, clauses: [[lit, lit], ...]}` with signed
//! 1-indexed literals.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, FormulaError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub seed: u64,
    pub n: usize,
    pub alpha: f64,
    pub ensemble: String,
    pub clauses: Vec<[i64; 2]>,
}

impl InstanceRecord {
    pub fn new(id: impl Into<String>, seed: u64, alpha: f64, ensemble: impl Into<String>, f: &Formula) -> Self {
        InstanceRecord {
            id: id.into(),
            seed,
            n: f.n_declared(),
            alpha,
            ensemble: ensemble.into(),
            clauses: f.to_dimacs_pairs(),
        }
    }

    pub fn formula(&self) -> Result<Formula, FormulaError> {
        Formula::from_dimacs_pairs(self.n, &self.clauses)
    }
}

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: FormulaError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_jsonl<'a, W, I>(records: I, mut out: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a InstanceRecord>,
{
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads every record and validates that each one is a well-formed formula.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<InstanceRecord>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: InstanceRecord =
            serde_json::from_str(&line).map_err(|source| JsonlError::Json { line: idx + 1, source })?;
        rec.formula().map_err(|source| JsonlError::Formula { line: idx + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = Formula::from_dimacs_pairs(4, &[[1, -2], [-3, 4]]).unwrap();
        let rec = InstanceRecord::new("a-0", 7, 0.5, "random", &f);
        let mut buf = Vec::new();
        write_jsonl([&rec], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "{\"id\":\"a-0\",\"seed\":7,\"n\":4,\"alpha\":0.5,\"ensemble\":\"random\",\"clauses\":[[1,-2],[-3,4]]}\n"
        );
        let back = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, vec![rec]);
        assert_eq!(back[0].formula().unwrap(), f);
    }

    #[test]
    fn invalid_formula_is_rejected_with_line() {
        let text = "{\"id\":\"x\",\"seed\":1,\"n\":2,\"alpha\":1.0,\"ensemble\":\"random\",\"clauses\":[[1,3]]}\n";
        assert!(matches!(read_jsonl(text.as_bytes()), Err(JsonlError::Formula { line: 1, .. })));
    }
}
