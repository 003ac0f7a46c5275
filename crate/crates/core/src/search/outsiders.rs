//! Ranks swaps that move ones out of sparse blocks into dense ones.

use crate::blocks::{check_dims, BlockGrid};
use crate::error::Result;
use crate::matrix::BinaryMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outsiders {
    /// The matrix already satisfies the block-matrix predicate.
    BlockMatrix,
    /// Candidate swaps `(i, j)`, `i < j`, most promising first.
    Swaps(Vec<(usize, usize)>),
}

/// Scored swap list. A block is "to be emptied" when its count is below the
/// mean block count and "to be filled" otherwise. For each pair of indices
/// in different groups the score accumulates, over every block row/column
/// where the two indices sit in opposite kinds of block, the product of the
/// ones in the emptied segment and the (negated) zeros in the filled segment,
/// scaled by the squared free capacity of the filled block. Scores are
/// non-positive; only strictly negative ones are returned, ascending.
pub fn outsiders(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<Outsiders> {
    let grid = BlockGrid::new(a, dim_b, dim_c)?;
    if grid.is_block_matrix() {
        return Ok(Outsiders::BlockMatrix);
    }
    Ok(Outsiders::Swaps(scored_swaps(a, &grid)?.into_iter().map(|(_, i, j)| (i, j)).collect()))
}

/// `(score, i, j)` triples sorted by ascending score, then by `(i, j)`.
pub fn scored_swaps(a: &BinaryMatrix, grid: &BlockGrid) -> Result<Vec<(i64, usize, usize)>> {
    let dim_b = grid.dim_b();
    let dim_c = grid.dim_c();
    check_dims(a, dim_b, dim_c)?;
    let n = a.n();
    let cap = (dim_c * dim_c) as i64;

    let emptied: Vec<bool> = grid.counts().iter().map(|&s| grid.below_mean(s)).collect();
    // (1 - density)^2 scaled by dim_c^4
    let free: Vec<i64> = grid
        .counts()
        .iter()
        .map(|&s| {
            let f = cap - s as i64;
            f * f
        })
        .collect();

    let t = a.transpose();
    let dc = dim_c as i64;
    // wr[i * dim_b + b]: row i against block column b
    // wc[j * dim_b + b]: column j against block row b
    let mut wr = vec![0i64; n * dim_b];
    let mut wc = vec![0i64; n * dim_b];
    for i in 0..n {
        let g = i / dim_c;
        for b in 0..dim_b {
            let ones = a.row_segment_count(i, b * dim_c, dim_c) as i64;
            wr[i * dim_b + b] = if emptied[g * dim_b + b] { ones } else { -(dc - ones) };
            let ones = t.row_segment_count(i, b * dim_c, dim_c) as i64;
            wc[i * dim_b + b] = if emptied[b * dim_b + g] { ones } else { -(dc - ones) };
        }
    }

    let mut out = Vec::new();
    for i in 0..n {
        let p = i / dim_c;
        for j in i + 1..n {
            let q = j / dim_c;
            if p == q {
                continue;
            }
            let mut ms = 0i64;
            for b in 0..dim_b {
                let (e_pb, e_qb) = (emptied[p * dim_b + b], emptied[q * dim_b + b]);
                if e_pb != e_qb {
                    let filled = if e_pb { q * dim_b + b } else { p * dim_b + b };
                    ms += wr[i * dim_b + b] * wr[j * dim_b + b] * free[filled];
                }
                let (e_bp, e_bq) = (emptied[b * dim_b + p], emptied[b * dim_b + q]);
                if e_bp != e_bq {
                    let filled = if e_bp { b * dim_b + q } else { b * dim_b + p };
                    ms += wc[i * dim_b + b] * wc[j * dim_b + b] * free[filled];
                }
            }
            if ms < 0 {
                out.push((ms, i, j));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}
