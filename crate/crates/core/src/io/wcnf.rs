//! DIMACS WCNF reading and writing for unit-weight two-literal formulas.
//!
//! The writer emits the pre-2022 header `p wcnf <vars> <clauses> <top>` with
//! `top = M + 1`, one `1 <lit> <lit> 0` line per clause. The reader accepts
//! comment lines, blank lines and any `top`, but only unit-weight soft
//! clauses of exactly two literals.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::formula::{Clause, Formula, FormulaError, Literal};

#[derive(Debug, Error)]
pub enum WcnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: FormulaError },
    #[error("missing `p wcnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> WcnfError {
    WcnfError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_wcnf<R: BufRead>(reader: R) -> Result<Formula, WcnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    // line number of each clause, for duplicate reporting
    let mut clause_lines = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "duplicate header"));
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() < 4 || fields.len() > 5 || fields[0] != "p" || fields[1] != "wcnf" {
                return Err(parse_err(line_no, format!("malformed header `{trimmed}`")));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad variable count `{}`", fields[2])))?;
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad clause count `{}`", fields[3])))?;
            if let Some(top) = fields.get(4) {
                top.parse::<u64>()
                    .map_err(|_| parse_err(line_no, format!("bad top weight `{top}`")))?;
            }
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or(WcnfError::MissingHeader)?;
        let tokens = trimmed
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse_err(line_no, format!("bad token `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if tokens.last() != Some(&0) {
            return Err(parse_err(line_no, "clause is not terminated by 0"));
        }
        if tokens.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected weight and 2 literals, found {} literals", tokens.len().saturating_sub(2)),
            ));
        }
        if tokens[0] != 1 {
            return Err(parse_err(line_no, format!("clause weight {} is not 1", tokens[0])));
        }
        let mut lits = [Literal::positive(0); 2];
        for (slot, &raw) in lits.iter_mut().zip(&tokens[1..3]) {
            let lit = Literal::from_dimacs(raw).map_err(|source| WcnfError::Formula { line: line_no, source })?;
            if lit.var() >= n {
                return Err(WcnfError::Formula {
                    line: line_no,
                    source: FormulaError::VariableOutOfRange { var: lit.var(), n },
                });
            }
            *slot = lit;
        }
        let clause =
            Clause::new(lits[0], lits[1]).map_err(|source| WcnfError::Formula { line: line_no, source })?;
        clauses.push(clause);
        clause_lines.push(line_no);
    }

    let (n, m) = header.ok_or(WcnfError::MissingHeader)?;
    if m != clauses.len() {
        return Err(WcnfError::ClauseCount {
            declared: m,
            found: clauses.len(),
        });
    }
    Formula::new(n, clauses).map_err(|source| {
        let line = match &source {
            FormulaError::DuplicateClause { index, .. } => clause_lines[*index],
            _ => 0,
        };
        WcnfError::Formula { line, source }
    })
}

pub fn write_wcnf<W: Write>(f: &Formula, mut out: W) -> io::Result<()> {
    writeln!(out, "p wcnf {} {} {}", f.n_declared(), f.num_clauses(), f.num_clauses() + 1)?;
    for c in f.clauses() {
        writeln!(out, "1 {} {} 0", c.first().to_dimacs(), c.second().to_dimacs())?;
    }
    Ok(())
}

pub fn to_wcnf_string(f: &Formula) -> String {
    let mut buf = Vec::new();
    write_wcnf(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("wcnf output is ASCII")
}
