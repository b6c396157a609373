//! Plain-text matrix and vector formats used by the command-line tools.
//!
//! Matrices are whitespace-separated dense rows, one row per line; a single
//! leading integer token may give the dimension explicitly, otherwise it is
//! inferred from the row count. `#` starts a comment. Asymmetric input is
//! rejected unless the caller opts into symmetrization.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Asymmetry above this fraction of max|entry| is rejected without
/// `symmetrize`.
pub const FILE_ASYM_TOL: f64 = 1e-9;

fn tokenize(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .map(|line| line.split_whitespace().collect::<Vec<_>>())
        .filter(|toks| !toks.is_empty())
        .collect()
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {tok:?}")))
}

/// Parses a symmetric matrix from text.
pub fn parse_matrix(text: &str, symmetrize: bool) -> Result<SymMatrix> {
    let mut rows = tokenize(text);
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }

    // optional dimension header: a lone integer first token that is
    // consistent with the remaining token count
    let mut n = rows.len();
    if rows[0].len() == 1 {
        if let Ok(header) = rows[0][0].parse::<usize>() {
            let rest: usize = rows[1..].iter().map(|r| r.len()).sum();
            if header >= 1 && rest == header * header {
                n = header;
                rows.remove(0);
            }
        }
    }

    let flat: Vec<f64> = rows
        .iter()
        .flatten()
        .map(|t| parse_f64(t))
        .collect::<Result<_>>()?;
    if flat.len() != n * n {
        return Err(Error::Parse(format!(
            "expected {} entries for a {n}x{n} matrix, found {}",
            n * n,
            flat.len()
        )));
    }
    if symmetrize {
        SymMatrix::new(n, flat)
    } else {
        SymMatrix::new_checked(n, flat, FILE_ASYM_TOL)
    }
}

/// Parses a vector of length `n` (one row or one column of numbers).
pub fn parse_vector(text: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = tokenize(text)
        .iter()
        .flatten()
        .map(|t| parse_f64(t))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Parse(format!(
            "expected a vector of length {n}, found {} entries",
            v.len()
        )));
    }
    Ok(v)
}
