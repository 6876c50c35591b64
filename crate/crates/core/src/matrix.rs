//! 0,1 matrices, combinatorial rectangles, and the plain-text matrix format.
//!
//! The file format is a header line `R C` followed by `R` lines of exactly
//! `C` characters from `{0,1}`. Lines starting with `#` are skipped, so a
//! gadget table can carry a `# ell=<l>` comment.

use std::fmt;
use std::io::Read;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar;

/// Rectangular 0,1 matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FixedBitSet>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(BoolMatrix {
            rows,
            cols,
            data: vec![FixedBitSet::with_capacity(cols); rows],
        })
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for (i, row) in m.data.iter_mut().enumerate() {
            for j in 0..cols {
                if f(i, j) {
                    row.insert(j);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of `0`/`1` values; all rows must have equal length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::param("rows have different lengths"));
        }
        Self::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j] != 0)
    }

    /// Circulant `n x n` matrix whose row `i` is `first_row` rotated right by `i`.
    pub fn circulant(first_row: &[bool]) -> Result<Self> {
        let n = first_row.len();
        Self::from_fn(n, n, |i, j| first_row[(j + n - i) % n])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.data[i]
    }

    pub fn row_ones(&self, i: usize) -> usize {
        self.data[i].count_ones(..)
    }

    pub fn col_ones(&self, j: usize) -> usize {
        self.data.iter().filter(|r| r.contains(j)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Coordinates of all one-entries in row-major order.
    pub fn ones_positions(&self) -> Vec<(usize, usize)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.ones().map(move |j| (i, j)))
            .collect()
    }

    pub fn complement(&self) -> BoolMatrix {
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut c = r.clone();
                c.toggle_range(..);
                c
            })
            .collect();
        BoolMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut t = BoolMatrix::zeros(self.cols, self.rows).expect("nonempty");
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.data[j].insert(i);
            }
        }
        t
    }

    /// Matrix with rows and columns reordered: entry `(i, j)` of the result is
    /// entry `(row_perm[i], col_perm[j])` of `self`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> BoolMatrix {
        BoolMatrix::from_fn(self.rows, self.cols, |i, j| self.get(row_perm[i], col_perm[j]))
            .expect("nonempty")
    }

    /// Returns `d` if every row and every column has exactly `d` ones.
    pub fn is_regular(&self) -> Result<Option<usize>> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let d = self.row_ones(0);
        let rows_ok = (0..self.rows).all(|i| self.row_ones(i) == d);
        let cols_ok = (0..self.cols).all(|j| self.col_ones(j) == d);
        Ok((rows_ok && cols_ok).then_some(d))
    }

    /// Rank over the rationals, by exact fraction-free elimination.
    pub fn real_rank(&self) -> usize {
        let entries: Vec<Vec<i64>> = self
            .data
            .iter()
            .map(|r| (0..self.cols).map(|j| r.contains(j) as i64).collect())
            .collect();
        scalar::exact_rank(&entries)
    }

    /// Serializes in the matrix file format (LF endings, trailing newline).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in &self.data {
            for j in 0..self.cols {
                s.push(if r.contains(j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .split('\n')
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut it = header.split(' ');
        let (rows, cols) = match (it.next(), it.next(), it.next()) {
            (Some(r), Some(c), None) => (parse_dim(r, hline)?, parse_dim(c, hline)?),
            _ => return Err(Error::parse(hline, "header must be `R C`")),
        };
        let mut m = BoolMatrix::zeros(rows, cols).map_err(|e| Error::parse(hline, e.to_string()))?;
        for i in 0..rows {
            let (lno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(hline + i + 1, format!("expected {rows} rows, found {i}")))?;
            let bytes = line.as_bytes();
            if let Some(pos) = bytes.iter().position(|&b| b != b'0' && b != b'1') {
                return Err(Error::parse(
                    lno,
                    format!("invalid character {:?} at column {}", line[pos..].chars().next().unwrap(), pos + 1),
                ));
            }
            if bytes.len() != cols {
                return Err(Error::parse(
                    lno,
                    format!("row has {} entries, expected {cols}", bytes.len()),
                ));
            }
            for (j, &b) in bytes.iter().enumerate() {
                if b == b'1' {
                    m.data[i].insert(j);
                }
            }
        }
        for (lno, rest) in lines {
            if !rest.is_empty() {
                return Err(Error::parse(lno, "unexpected content after last row"));
            }
        }
        Ok(m)
    }

    pub fn read_from(mut reader: impl Read) -> Result<Self> {
        let mut s = String::new();
        reader.read_to_string(&mut s)?;
        Self::parse(&s)
    }
}

fn parse_dim(s: &str, line: usize) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("invalid dimension {s:?}")));
    }
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid dimension {s:?}")))
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            let s: String = (0..self.cols)
                .map(|j| if r.contains(j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Random `n x n` `d`-regular matrix, deterministic in `seed`.
///
/// The support is a union of `d` permutation matrices with pairwise disjoint
/// supports. Each permutation is a perfect matching drawn from the cells not
/// yet used; those cells form an `(n - k)`-regular bipartite graph after `k`
/// rounds, so a perfect matching always exists and no retry is needed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<BoolMatrix> {
    if d == 0 || d >= n {
        return Err(Error::param(format!(
            "random_regular needs 0 < d < n, got n={n}, d={d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = BoolMatrix::zeros(n, n)?;
    for _ in 0..d {
        let matching = random_perfect_matching(&m, &mut rng);
        for (i, j) in matching.into_iter().enumerate() {
            m.data[i].insert(j);
        }
    }
    Ok(m)
}

/// Perfect matching in the bipartite graph of zero cells, randomized by
/// shuffling the visiting order (Kuhn's augmenting paths).
fn random_perfect_matching(used: &BoolMatrix, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = used.rows;
    let mut cand: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !used.get(i, j)).collect())
        .collect();
    for c in cand.iter_mut() {
        c.shuffle(rng);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut col_match: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        cand: &[Vec<usize>],
        seen: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for &j in &cand[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if col_match[j].is_none_or(|k| augment(k, cand, seen, col_match)) {
                col_match[j] = Some(i);
                return true;
            }
        }
        false
    }
    for &i in &order {
        let mut seen = vec![false; n];
        let ok = augment(i, &cand, &mut seen, &mut col_match);
        assert!(ok, "regular bipartite graph has a perfect matching");
    }
    let mut row_match = vec![0; n];
    for (j, i) in col_match.iter().enumerate() {
        row_match[i.expect("perfect")] = j;
    }
    row_match
}

/// Combinatorial rectangle: a row set times a column set, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    /// Canonicalizes (sorts, dedups) the index lists; both must be non-empty.
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::param("rectangle row and column sets must be non-empty"));
        }
        Ok(Rectangle { rows, cols })
    }

    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .flat_map(move |&i| self.cols.iter().map(move |&j| (i, j)))
    }

    pub fn check_bounds(&self, rows: usize, cols: usize) -> Result<()> {
        let bad_row = self.rows.iter().find(|&&i| i >= rows);
        let bad_col = self.cols.iter().find(|&&j| j >= cols);
        match (bad_row, bad_col) {
            (Some(i), _) => Err(Error::OutOfBounds(format!("row {i} >= {rows}"))),
            (_, Some(j)) => Err(Error::OutOfBounds(format!("column {j} >= {cols}"))),
            _ => Ok(()),
        }
    }
}
