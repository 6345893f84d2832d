use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// A linear system `Mx = c` over GF(2), stored by row supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystemZ2 {
    n: usize,
    rows: Vec<Vec<usize>>,
    rhs: Vec<bool>,
    names: Vec<String>,
}

impl LinearSystemZ2 {
    /// Rows are 0-based column supports; they are sorted on construction.
    pub fn new(n: usize, rows: Vec<Vec<usize>>, rhs: Vec<bool>) -> Result<Self> {
        let names = (1..=n).map(|j| format!("x{j}")).collect();
        Self::with_names(n, rows, rhs, names)
    }

    pub fn with_names(n: usize, mut rows: Vec<Vec<usize>>, rhs: Vec<bool>, names: Vec<String>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::malformed("row count and right-hand side length differ"));
        }
        if names.len() != n {
            return Err(Error::malformed("column name count differs from column count"));
        }
        for (i, r) in rows.iter_mut().enumerate() {
            r.sort_unstable();
            if r.is_empty() {
                return Err(Error::malformed(format!("row {} is empty", i + 1)));
            }
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::malformed(format!("row {} repeats a column", i + 1)));
            }
            if r.last().is_some_and(|&j| j >= n) {
                return Err(Error::malformed(format!("row {} has a column out of range", i + 1)));
            }
        }
        Ok(LinearSystemZ2 { n, rows, rhs, names })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rhs(&self) -> &[bool] {
        &self.rhs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `t_R`: largest row weight.
    pub fn row_weight_max(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `t_M`: number of nonzero entries.
    pub fn nonzero_total(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::new(self.n, self.rows.iter().map(|r| BitVec::from_indices(self.n, r.iter().copied())).collect())
    }

    pub fn rhs_bits(&self) -> BitVec {
        BitVec::from_indices(self.m(), (0..self.m()).filter(|&i| self.rhs[i]))
    }

    /// Columns that appear in no row.
    pub fn orphan_columns(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for r in &self.rows {
            for &j in r {
                used[j] = true;
            }
        }
        (0..self.n).filter(|&j| !used[j]).collect()
    }

    pub fn satisfied_by(&self, x: &BitVec) -> bool {
        self.matrix().mul_vec(x) == self.rhs_bits()
    }

    /// Header `m n`, then one line `j1 j2 ... | c` per row with 1-based columns.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.m(), self.n);
        for (r, &c) in self.rows.iter().zip(&self.rhs) {
            let cols: Vec<String> = r.iter().map(|j| (j + 1).to_string()).collect();
            let _ = writeln!(s, "{} | {}", cols.join(" "), c as u8);
        }
        s
    }

    /// Sidecar: one `index name` line per column, 1-based.
    pub fn names_to_text(&self) -> String {
        let mut s = String::new();
        for (j, name) in self.names.iter().enumerate() {
            let _ = writeln!(s, "{} {}", j + 1, name);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::malformed("empty system file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::malformed(format!("line {hl}: header must be `m n`")))?;
        if dims.len() != 2 {
            return Err(Error::malformed(format!("line {hl}: header must be `m n`")));
        }
        let (m, n) = (dims[0], dims[1]);
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (k, line) in lines {
            let bad = |msg: &str| Error::malformed(format!("line {k}: {msg}"));
            let (cols, c) = line.split_once('|').ok_or_else(|| bad("expected `j1 j2 ... | c`"))?;
            let row = cols
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(j) if j >= 1 => Ok(j - 1),
                    _ => Err(bad("column indices are 1-based integers")),
                })
                .collect::<Result<Vec<_>>>()?;
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad("columns must be strictly ascending"));
            }
            rhs.push(match c.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad("right-hand side must be 0 or 1")),
            });
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::malformed(format!("header declares {m} rows, found {}", rows.len())));
        }
        Self::new(n, rows, rhs)
    }

    /// Attach names from a sidecar produced by [`names_to_text`](Self::names_to_text).
    pub fn parse_names(&self, text: &str) -> Result<Self> {
        let mut names = self.names.clone();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx, name) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::malformed(format!("names line {}: expected `index name`", k + 1)))?;
            let j: usize = idx
                .parse()
                .ok()
                .filter(|&j| j >= 1 && j <= self.n)
                .ok_or_else(|| Error::malformed(format!("names line {}: bad column index", k + 1)))?;
            names[j - 1] = name.trim().to_owned();
        }
        Self::with_names(self.n, self.rows.clone(), self.rhs.clone(), names)
    }
}

/// The Mermin-Peres magic square: variables `x1..x9` in a 3x3 grid (row-major),
/// three row equations with right-hand side 0, then three column equations
/// with right-hand sides 0, 0, 1.
pub fn magic_square() -> LinearSystemZ2 {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..3 {
        rows.push(vec![3 * r, 3 * r + 1, 3 * r + 2]);
        rhs.push(false);
    }
    for c in 0..3 {
        rows.push(vec![c, c + 3, c + 6]);
        rhs.push(c == 2);
    }
    LinearSystemZ2::new(9, rows, rhs).unwrap()
}

/// `{x1 = 0, x1 = 1}`.
pub fn inconsistent_pair() -> LinearSystemZ2 {
    LinearSystemZ2::new(1, vec![vec![0], vec![0]], vec![false, true]).unwrap()
}
