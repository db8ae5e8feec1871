//! Plain-text coordinate dump of a strip stiffness matrix.
//!
//! ```text
//! % deltaprime coo
//! <n> <nnz>
//! <row> <col> <value>      (0-based, one entry per line)
//! ```

use std::io::{self, Write};

use super::form::SymmetricOperator2D;
use crate::error::{Error, Result};

const HEADER: &str = "% deltaprime coo";

/// Largest dimension accepted by [`read_coo`].
pub const MAX_COO_DIM: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    /// Largest `|A_ij - A_ji|` over stored entries; duplicates are summed first.
    pub fn asymmetry(&self) -> f64 {
        let mut e = self.entries.clone();
        e.sort_by_key(|x| (x.0, x.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(e.len());
        for (i, j, v) in e {
            match merged.last_mut() {
                Some(l) if l.0 == i && l.1 == j => l.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut worst: f64 = 0.0;
        for &(i, j, v) in &merged {
            let t = merged
                .binary_search_by(|x| (x.0, x.1).cmp(&(j, i)))
                .map(|k| merged[k].2)
                .unwrap_or(0.0);
            worst = worst.max((v - t).abs());
        }
        worst
    }
}

pub fn write_coo(op: &SymmetricOperator2D, mut out: impl Write) -> io::Result<()> {
    let t = op.triplets();
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {}", op.len(), t.len())?;
    for (i, j, v) in t {
        writeln!(out, "{i} {j} {v}")?;
    }
    Ok(())
}

pub fn read_coo(text: &str) -> Result<CooMatrix> {
    let bad = |line: usize, msg: &str| Error::Config(format!("coo line {line}: {msg}"));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return Err(bad(1, "missing header")),
    }
    let (ln, size) = lines.next().ok_or_else(|| bad(2, "missing size line"))?;
    let mut it = size.split_whitespace();
    let mut num = |what: &str| -> Result<usize> {
        it.next()
            .ok_or_else(|| bad(ln + 1, &format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|_| bad(ln + 1, &format!("bad {what}")))
    };
    let n = num("dimension")?;
    let nnz = num("entry count")?;
    if n > MAX_COO_DIM || nnz > n.saturating_mul(n).min(MAX_COO_DIM * 16) {
        return Err(bad(ln + 1, "size out of range"));
    }
    let mut entries = Vec::with_capacity(nnz.min(1 << 20));
    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(bad(ln + 1, "expected `row col value`"));
        }
        let i: usize = f[0].parse().map_err(|_| bad(ln + 1, "bad row"))?;
        let j: usize = f[1].parse().map_err(|_| bad(ln + 1, "bad column"))?;
        let v: f64 = f[2].parse().map_err(|_| bad(ln + 1, "bad value"))?;
        if i >= n || j >= n {
            return Err(bad(ln + 1, "index out of range"));
        }
        if !v.is_finite() {
            return Err(bad(ln + 1, "value not finite"));
        }
        entries.push((i, j, v));
        if entries.len() > nnz {
            return Err(bad(ln + 1, "more entries than declared"));
        }
    }
    if entries.len() != nnz {
        return Err(Error::Config(format!("coo: declared {nnz} entries, found {}", entries.len())));
    }
    Ok(CooMatrix { n, entries })
}
