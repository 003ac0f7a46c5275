//! Block views of a matrix: `dim_b x dim_b` blocks of side `dim_c`.

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

pub(crate) fn check_dims(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<()> {
    if dim_b == 0 || dim_c == 0 || dim_b * dim_c != a.n() {
        return Err(Error::DimensionMismatch {
            dim_b,
            dim_c,
            n: a.n(),
        });
    }
    Ok(())
}

/// Per-block one counts of a matrix partitioned into `dim_b x dim_b` blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    dim_b: usize,
    dim_c: usize,
    counts: Vec<u64>,
    total: u64,
}

impl BlockGrid {
    pub fn new(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<Self> {
        check_dims(a, dim_b, dim_c)?;
        let mut counts = vec![0u64; dim_b * dim_b];
        fill_counts(a, dim_b, dim_c, &mut counts);
        let total = counts.iter().sum();
        Ok(BlockGrid {
            dim_b,
            dim_c,
            counts,
            total,
        })
    }

    /// Grid from explicit counts (row-major, `dim_b * dim_b` entries).
    pub fn from_counts(dim_b: usize, dim_c: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != dim_b * dim_b {
            return Err(Error::SizeMismatch {
                expected: dim_b * dim_b,
                actual: counts.len(),
            });
        }
        if let Some(&c) = counts.iter().find(|&&c| c as usize > dim_c * dim_c) {
            return Err(Error::Precondition(format!(
                "block count {c} exceeds block capacity {}",
                dim_c * dim_c
            )));
        }
        let total = counts.iter().sum();
        Ok(BlockGrid {
            dim_b,
            dim_c,
            counts,
            total,
        })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.dim_b + j]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Mean block count as `(numerator, denominator)`.
    pub fn mu_ratio(&self) -> (u64, u64) {
        (self.total, (self.dim_b * self.dim_b) as u64)
    }

    pub fn mu(&self) -> f64 {
        self.total as f64 / (self.dim_b * self.dim_b) as f64
    }

    /// `count > mu`, evaluated exactly.
    #[inline]
    pub(crate) fn above_mean(&self, count: u64) -> bool {
        count * (self.dim_b * self.dim_b) as u64 > self.total
    }

    /// `count < mu`, evaluated exactly.
    #[inline]
    pub(crate) fn below_mean(&self, count: u64) -> bool {
        count * ((self.dim_b * self.dim_b) as u64) < self.total
    }

    /// Every block is empty or holds strictly more ones than the mean block.
    /// Also accepted: all blocks nonempty with one common count, which is the
    /// shape of `J ⊗ C` and would otherwise fail the strict comparison.
    pub fn is_block_matrix(&self) -> bool {
        if self.all_nonempty_equal() {
            return true;
        }
        self.counts.iter().all(|&s| s == 0 || self.above_mean(s))
    }

    /// All nonzero blocks hold the same number of ones.
    pub fn balanced_blocks(&self) -> bool {
        let mut nonzero = self.counts.iter().filter(|&&s| s > 0);
        match nonzero.next() {
            None => true,
            Some(&first) => nonzero.all(|&s| s == first),
        }
    }

    fn all_nonempty_equal(&self) -> bool {
        let first = self.counts[0];
        first > 0 && self.counts.iter().all(|&s| s == first)
    }

    /// Row-major occupancy flags.
    pub fn occupancy(&self) -> Vec<bool> {
        self.counts.iter().map(|&s| s > 0).collect()
    }
}

/// Writes block counts of `a` into `counts` (row-major, `dim_b²` entries).
pub(crate) fn fill_counts(a: &BinaryMatrix, dim_b: usize, dim_c: usize, counts: &mut [u64]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for r in 0..a.n() {
        let br = r / dim_c;
        let row = &mut counts[br * dim_b..(br + 1) * dim_b];
        for (bc, slot) in row.iter_mut().enumerate() {
            *slot += a.row_segment_count(r, bc * dim_c, dim_c) as u64;
        }
    }
}
