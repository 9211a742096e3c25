//! Expansion of exponent matrices into binary parity-check matrices, plus the
//! GF(2) linear algebra and alist file I/O those matrices need.
//!
//! A cell shift `p` lifts to the `N x N` circulant permutation matrix with a 1
//! at `(r, (r + p) mod N)` for every row `r`; a cell with several shifts lifts
//! to the sum of the corresponding CPMs, and ABSENT lifts to the zero block.
//! Shift values inside a cell are distinct by construction, so entries never
//! cancel mod 2.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exponent::ExponentMatrix;

/// A 0/1 matrix in double adjacency form: per-column sorted row indices and
/// per-row sorted column indices describing the same entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    col_adj: Vec<Vec<u32>>,
    row_adj: Vec<Vec<u32>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from per-column supports. Indices must be in range;
    /// duplicates within a column are rejected.
    pub fn from_column_supports(rows: usize, col_supports: Vec<Vec<u32>>) -> Result<Self> {
        let cols = col_supports.len();
        let mut col_adj = col_supports;
        let mut row_adj = vec![Vec::new(); rows];
        for (j, support) in col_adj.iter_mut().enumerate() {
            support.sort_unstable();
            if support.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Shape(format!("duplicate row index in column {j}")));
            }
            if let Some(&max) = support.last() {
                if max as usize >= rows {
                    return Err(Error::Shape(format!(
                        "row index {max} out of range in column {j}"
                    )));
                }
            }
            for &r in support.iter() {
                row_adj[r as usize].push(j as u32);
            }
        }
        Ok(Self {
            rows,
            cols,
            col_adj,
            row_adj,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sorted row indices with a 1 in column `j`.
    pub fn column(&self, j: usize) -> &[u32] {
        &self.col_adj[j]
    }

    /// Sorted column indices with a 1 in row `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.row_adj[i]
    }

    /// Total number of 1 entries.
    pub fn ones(&self) -> usize {
        self.col_adj.iter().map(|c| c.len()).sum()
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        self.col_adj.iter().map(|c| c.len()).collect()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_adj.iter().map(|r| r.len()).collect()
    }

    /// Column weight when all columns agree, otherwise None.
    pub fn regular_column_weight(&self) -> Option<usize> {
        let d = self.col_adj.first()?.len();
        self.col_adj.iter().all(|c| c.len() == d).then_some(d)
    }

    /// True when the columns listed in `support` sum to zero mod 2.
    pub fn is_codeword_support(&self, support: &[u32]) -> bool {
        let mut parity = vec![false; self.rows];
        for &j in support {
            for &r in self.column(j as usize) {
                parity[r as usize] ^= true;
            }
        }
        parity.iter().all(|&p| !p)
    }

    /// True when `H x = 0` for the dense bit vector `x`.
    pub fn satisfies(&self, bits: &[bool]) -> bool {
        self.row_adj.iter().all(|row| {
            row.iter()
                .fold(false, |acc, &j| acc ^ bits[j as usize])
        })
    }

    /// Rank over GF(2), by bit-packed row elimination.
    pub fn gf2_rank(&self) -> usize {
        let words = self.cols.div_ceil(64);
        // pivot_rows[w] holds reduced rows whose leading bit falls anywhere;
        // indexed lookup by leading column keeps elimination O(rank * rows).
        let mut pivot_by_col: Vec<Option<Vec<u64>>> = vec![None; self.cols];
        let mut rank = 0;
        for i in 0..self.rows {
            let mut cur = vec![0u64; words];
            for &j in &self.row_adj[i] {
                cur[(j as usize) / 64] |= 1u64 << (j % 64);
            }
            loop {
                let lead = match leading_bit(&cur) {
                    Some(l) => l,
                    None => break,
                };
                match &pivot_by_col[lead] {
                    Some(p) => {
                        for (c, pw) in cur.iter_mut().zip(p.iter()) {
                            *c ^= pw;
                        }
                    }
                    None => {
                        pivot_by_col[lead] = Some(cur);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// Writes the matrix in alist text form: `n m`, max degrees, per-column
    /// degrees, per-row degrees, then 1-based per-column and per-row index
    /// lists, one line each, unpadded.
    pub fn to_alist(&self) -> String {
        let mut out = String::new();
        let max_col = self.col_adj.iter().map(|c| c.len()).max().unwrap_or(0);
        let max_row = self.row_adj.iter().map(|r| r.len()).max().unwrap_or(0);
        out.push_str(&format!("{} {}\n{} {}\n", self.cols, self.rows, max_col, max_row));
        push_numbers(&mut out, self.col_adj.iter().map(|c| c.len()));
        push_numbers(&mut out, self.row_adj.iter().map(|r| r.len()));
        for c in &self.col_adj {
            push_numbers(&mut out, c.iter().map(|&r| r as usize + 1));
        }
        for r in &self.row_adj {
            push_numbers(&mut out, r.iter().map(|&c| c as usize + 1));
        }
        out
    }

    /// Parses alist text. Zero entries (padding used by some writers) are
    /// ignored; the row lists are cross-checked against the column lists.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut nums = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|_| Error::AlistParse(format!("bad token: {tok}")))
            })
            .collect::<Result<Vec<i64>>>()?
            .into_iter();
        let mut next = |what: &str| {
            nums.next()
                .ok_or_else(|| Error::AlistParse(format!("truncated before {what}")))
        };
        let n = next("n")? as usize;
        let m = next("m")? as usize;
        let max_col = next("max col degree")? as usize;
        let max_row = next("max row degree")? as usize;
        let col_deg: Vec<usize> = (0..n)
            .map(|_| next("column degree").map(|x| x as usize))
            .collect::<Result<_>>()?;
        let row_deg: Vec<usize> = (0..m)
            .map(|_| next("row degree").map(|x| x as usize))
            .collect::<Result<_>>()?;
        if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
            return Err(Error::AlistParse("degree exceeds declared maximum".into()));
        }
        // Column lists may be written exactly (degree entries) or padded with
        // zeros to the max degree. Collect greedily: read `deg` nonzero
        // entries, then skip zeros if the writer padded.
        let mut remaining: Vec<i64> = nums.collect();
        remaining.reverse();
        let padded = remaining.len()
            == n * max_col + m * max_row;
        let exact = remaining.len()
            == col_deg.iter().sum::<usize>() + row_deg.iter().sum::<usize>();
        if !padded && !exact {
            return Err(Error::AlistParse(format!(
                "unexpected entry count {}",
                remaining.len()
            )));
        }
        let mut take_list = |deg: usize, width: usize| -> Result<Vec<u32>> {
            let count = if padded { width } else { deg };
            let mut out = Vec::with_capacity(deg);
            for _ in 0..count {
                let x = remaining
                    .pop()
                    .ok_or_else(|| Error::AlistParse("truncated index list".into()))?;
                if x > 0 {
                    out.push(x as u32 - 1);
                }
            }
            if out.len() != deg {
                return Err(Error::AlistParse("index list disagrees with degree".into()));
            }
            Ok(out)
        };
        let mut col_supports = Vec::with_capacity(n);
        for &deg in &col_deg {
            col_supports.push(take_list(deg, max_col)?);
        }
        let matrix = Self::from_column_supports(m, col_supports)?;
        // The row lists are redundant; consume them and verify they agree
        // with the adjacency derived from the column lists.
        for (i, &deg) in row_deg.iter().enumerate() {
            let mut listed = take_list(deg, max_row)?;
            listed.sort_unstable();
            if listed != matrix.row_adj[i] {
                return Err(Error::AlistParse(format!(
                    "row {i} list disagrees with column lists"
                )));
            }
        }
        Ok(matrix)
    }
}

fn push_numbers<I: Iterator<Item = usize>>(out: &mut String, nums: I) {
    let mut first = true;
    for x in nums {
        if !first {
            out.push(' ');
        }
        out.push_str(&x.to_string());
        first = false;
    }
    out.push('\n');
}

fn leading_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// An exponent matrix expanded at lifting degree `N`, with its parity-check
/// matrix. Code length is `n * N`, row count `m * N`.
#[derive(Debug, Clone)]
pub struct LiftedCode {
    exponent: ExponentMatrix,
    n_lift: u32,
    h: SparseBinaryMatrix,
    rank: OnceLock<usize>,
}

impl LiftedCode {
    pub fn exponent(&self) -> &ExponentMatrix {
        &self.exponent
    }

    /// Lifting degree.
    pub fn n_lift(&self) -> u32 {
        self.n_lift
    }

    pub fn matrix(&self) -> &SparseBinaryMatrix {
        &self.h
    }

    /// Code length `n * N`.
    pub fn len(&self) -> usize {
        self.h.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// GF(2) rank of the parity-check matrix, computed once.
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.h.gf2_rank())
    }

    /// Code dimension `len - rank`.
    pub fn dim(&self) -> usize {
        self.len() - self.rank()
    }

    /// Rate `dim / len` from the computed dimension.
    pub fn rate(&self) -> f64 {
        self.dim() as f64 / self.len() as f64
    }
}

/// Expands `p` at lifting degree `n_lift`, which must exceed every shift so
/// that no two shifts alias mod N.
pub fn lift(p: &ExponentMatrix, n_lift: u32) -> Result<LiftedCode> {
    if let Some(max_shift) = p.max_shift() {
        if max_shift >= n_lift {
            return Err(Error::LiftingDegreeTooSmall {
                n: n_lift,
                max_shift,
            });
        }
    }
    let nn = n_lift as usize;
    let rows = p.levels() * nn;
    let mut col_supports = Vec::with_capacity(p.cols() * nn);
    for j in 0..p.cols() {
        for s in 0..nn {
            let mut support = Vec::new();
            for i in 0..p.levels() {
                for &shift in p.cell(i, j).shifts() {
                    let r = (s + nn - shift as usize) % nn;
                    support.push((i * nn + r) as u32);
                }
            }
            col_supports.push(support);
        }
    }
    let h = SparseBinaryMatrix::from_column_supports(rows, col_supports)?;
    Ok(LiftedCode {
        exponent: p.clone(),
        n_lift,
        h,
        rank: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exponent::ExponentMatrix;

    fn one_row(cells: &[&[u32]]) -> ExponentMatrix {
        ExponentMatrix::from_rows(vec![cells.iter().map(|c| Some(c.to_vec())).collect()]).unwrap()
    }

    #[test]
    fn lift_zero_shift_is_identity() {
        let code = lift(&one_row(&[&[0]]), 3).unwrap();
        for j in 0..3 {
            assert_eq!(code.matrix().column(j), &[j as u32]);
        }
    }

    #[test]
    fn lift_shift_one() {
        // I^1 has its row-r one in column r+1, so column c is hit by row c-1.
        let code = lift(&one_row(&[&[1]]), 3).unwrap();
        assert_eq!(code.matrix().column(0), &[2]);
        assert_eq!(code.matrix().column(1), &[0]);
        assert_eq!(code.matrix().column(2), &[1]);
    }

    #[test]
    fn lift_rejects_aliasing_degree() {
        assert!(matches!(
            lift(&one_row(&[&[0, 5]]), 5),
            Err(Error::LiftingDegreeTooSmall { .. })
        ));
    }

    #[test]
    fn lifted_k3_t6_is_3_18_regular() {
        let fam = &catalog::lookup(3, 6).unwrap().family;
        let p = ExponentMatrix::construction1(fam);
        let code = lift(&p, 37).unwrap();
        assert_eq!(code.len(), 222);
        assert_eq!(code.matrix().rows(), 37);
        assert_eq!(code.matrix().regular_column_weight(), Some(3));
        assert!(code.matrix().row_degrees().iter().all(|&d| d == 18));
        assert_eq!(code.matrix().ones(), 37 * p.total_shifts());
    }

    #[test]
    fn identity_rank() {
        let code = lift(&one_row(&[&[0]]), 3).unwrap();
        assert_eq!(code.matrix().gf2_rank(), 3);
        assert_eq!(code.dim(), 0);
    }

    #[test]
    fn all_ones_codeword_of_k4_t1() {
        let fam = &catalog::lookup(4, 1).unwrap().family;
        let code = lift(&ExponentMatrix::construction1(fam), 13).unwrap();
        let support: Vec<u32> = (0..13).collect();
        assert!(code.matrix().is_codeword_support(&support));
        assert_eq!(code.dim(), 1);
    }

    #[test]
    fn alist_round_trip() {
        let fam = &catalog::lookup(3, 2).unwrap().family;
        let code = lift(&ExponentMatrix::construction1(fam), 13).unwrap();
        let text = code.matrix().to_alist();
        let parsed = SparseBinaryMatrix::from_alist(&text).unwrap();
        assert_eq!(&parsed, code.matrix());
    }

    #[test]
    fn alist_accepts_zero_padding() {
        // 2x3 matrix, padded variant: columns with fewer entries than the max
        // degree carry trailing zeros.
        let text = "3 2\n2 3\n2 1 2\n3 2\n1 2\n1 0\n1 2\n1 2 3\n1 3 0\n";
        let m = SparseBinaryMatrix::from_alist(text).unwrap();
        assert_eq!(m.cols(), 3);
        assert_eq!(m.rows(), 2);
        assert_eq!(m.column(0), &[0, 1]);
        assert_eq!(m.column(1), &[0]);
        assert_eq!(m.column(2), &[0, 1]);
    }

    #[test]
    fn alist_rejects_inconsistent_rows() {
        // Column lists put a single 1 in row 1, but the row list claims two.
        let text = "2 1\n1 2\n1 0\n2\n1\n1 2\n";
        assert!(SparseBinaryMatrix::from_alist(text).is_err());
    }
}
