//! Dense bit matrices over GF(2).

use std::fmt;

use serde::{Deserialize, Serialize};

const WORD: usize = 64;

/// Rows are received signals, columns are the data streams they combine.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl Gf2Matrix {
    pub fn new(cols: usize) -> Self {
        Gf2Matrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::new(cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    fn words(&self) -> usize {
        self.cols.div_ceil(WORD)
    }

    pub fn push_row(&mut self, bits: &[bool]) {
        assert_eq!(bits.len(), self.cols, "row width mismatch");
        let mut row = vec![0u64; self.words()];
        for (j, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            row[j / WORD] |= 1 << (j % WORD);
        }
        self.rows.push(row);
    }

    /// Unit row selecting column `col`.
    pub fn push_identity_row(&mut self, col: usize) {
        let mut bits = vec![false; self.cols];
        bits[col] = true;
        self.push_row(&bits);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col / WORD] >> (col % WORD) & 1 == 1
    }

    pub fn row(&self, row: usize) -> Vec<bool> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    /// Rank by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / WORD, 1u64 << (col % WORD));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x ^= p;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    pub fn has_full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows.len(), self.cols)?;
        for r in 0..self.rows.len() {
            let s: String = self
                .row(r)
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
