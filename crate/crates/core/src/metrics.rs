//! Search objectives (VAR and FROB) and binary nearest-Kronecker extraction.
//!
//! Both objectives are maximized. The distance of a matrix from Kronecker
//! form is reported separately as the Hamming residual of [`FactorPair`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blocks::{check_dims, BlockGrid};
use crate::error::Result;
use crate::matrix::{BinaryMatrix, BitWriter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    Var,
    Frob,
}

impl MetricKind {
    pub fn other(self) -> Self {
        match self {
            MetricKind::Var => MetricKind::Frob,
            MetricKind::Frob => MetricKind::Var,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Var => "VAR",
            MetricKind::Frob => "FROB",
        })
    }
}

/// Exact population variance `num / den` of a multiset of block counts.
#[derive(Clone, Copy, Debug)]
pub struct Variance {
    num: u128,
    den: u128,
}

impl Variance {
    /// Population variance of `values`, kept as an exact fraction.
    pub fn of(values: &[u64]) -> Self {
        let k = values.len() as u128;
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let sum_sq: u128 = values.iter().map(|&v| (v as u128) * (v as u128)).sum();
        Variance {
            num: k * sum_sq - sum * sum,
            den: k * k,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Variance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Variance {}

impl PartialOrd for Variance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Variance {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Variance of the per-block one counts. Grows as the matrix approaches
/// block form.
pub fn var_metric(g: &BlockGrid) -> Variance {
    Variance::of(g.counts())
}

/// Sum of squared entries of `F Fᵀ`, where row `i * dim_b + j` of `F` is block
/// `(i, j)` of `a` vectorized row-major.
pub fn frob_metric(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<u64> {
    check_dims(a, dim_b, dim_c)?;
    let mut vecs = BlockVectors::default();
    vecs.load(a, dim_c, dim_b);
    Ok(vecs.frob())
}

/// Binary factors recovered from a blocked matrix, with their Hamming
/// residual `‖A − B ⊗ C‖`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorPair {
    pub b: BinaryMatrix,
    pub c: BinaryMatrix,
    pub residual: u64,
}

impl FactorPair {
    pub fn is_exact(&self) -> bool {
        self.residual == 0
    }
}

/// `b[i][j] = 1` iff block `(i, j)` is nonzero; `c` is the entrywise majority
/// over the nonzero blocks, ties resolved to 1. An all-zero `a` yields zero
/// factors with residual 0.
pub fn nearest_binary_kronecker(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<FactorPair> {
    check_dims(a, dim_b, dim_c)?;
    let mut vecs = BlockVectors::default();
    vecs.load(a, dim_c, dim_b);
    Ok(vecs.nearest_factors())
}

/// True iff `a` equals `B ⊗ C` for binary `B` (`dim_b x dim_b`) and `C`
/// (`dim_c x dim_c`) under the natural blocking.
pub fn is_exact_kronecker(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<bool> {
    check_dims(a, dim_b, dim_c)?;
    let mut vecs = BlockVectors::default();
    vecs.load(a, dim_c, dim_b);
    Ok(vecs.all_nonzero_equal())
}

/// Vectorized blocks of the leading `k x k` block submatrix of a matrix.
/// Reusable between evaluations to avoid reallocating.
#[derive(Clone, Debug, Default)]
pub(crate) struct BlockVectors {
    k: usize,
    dim_c: usize,
    stride: usize,
    data: Vec<u64>,
    weights: Vec<u32>,
    nonzero: Vec<usize>,
    writer: BitWriter,
}

impl BlockVectors {
    /// Vectorizes blocks `(i, j)` with `i, j < k` of `a` blocked by `dim_c`.
    pub fn load(&mut self, a: &BinaryMatrix, dim_c: usize, k: usize) {
        let bits = dim_c * dim_c;
        self.k = k;
        self.dim_c = dim_c;
        self.stride = bits.div_ceil(64);
        self.data.clear();
        self.data.reserve(k * k * self.stride);
        self.weights.clear();
        self.nonzero.clear();
        for bi in 0..k {
            for bj in 0..k {
                self.writer.reset(bits);
                for r in 0..dim_c {
                    self.writer
                        .push_range(a.row(bi * dim_c + r), bj * dim_c, dim_c);
                }
                let w: u32 = self.writer.words.iter().map(|x| x.count_ones()).sum();
                if w > 0 {
                    self.nonzero.push(bi * k + bj);
                }
                self.weights.push(w);
                self.data.extend_from_slice(&self.writer.words);
            }
        }
    }

    #[inline]
    fn vec(&self, idx: usize) -> &[u64] {
        &self.data[idx * self.stride..(idx + 1) * self.stride]
    }

    #[inline]
    fn dot(&self, p: usize, q: usize) -> u64 {
        self.vec(p)
            .iter()
            .zip(self.vec(q))
            .map(|(x, y)| (x & y).count_ones() as u64)
            .sum()
    }

    pub fn frob(&self) -> u64 {
        let mut total = 0u64;
        for (t, &p) in self.nonzero.iter().enumerate() {
            let w = self.weights[p] as u64;
            total += w * w;
            for &q in &self.nonzero[t + 1..] {
                let d = self.dot(p, q);
                total += 2 * d * d;
            }
        }
        total
    }

    pub fn all_nonzero_equal(&self) -> bool {
        match self.nonzero.split_first() {
            None => true,
            Some((&first, rest)) => rest.iter().all(|&q| self.vec(q) == self.vec(first)),
        }
    }

    pub fn nearest_factors(&self) -> FactorPair {
        let k = self.k;
        let dim_c = self.dim_c;
        let mut b = BinaryMatrix::zeros(k);
        for &idx in &self.nonzero {
            b.set(idx / k, idx % k, true);
        }
        let mut c = BinaryMatrix::zeros(dim_c);
        let voters = self.nonzero.len();
        if voters > 0 {
            for pos in 0..dim_c * dim_c {
                let (w, bit) = (pos / 64, pos % 64);
                let ones = self
                    .nonzero
                    .iter()
                    .filter(|&&q| (self.vec(q)[w] >> bit) & 1 == 1)
                    .count();
                if 2 * ones >= voters {
                    c.set(pos / dim_c, pos % dim_c, true);
                }
            }
        }
        let mut cvec = BitWriter::default();
        cvec.reset(dim_c * dim_c);
        for r in 0..dim_c {
            cvec.push_range(c.row(r), 0, dim_c);
        }
        let residual = self
            .nonzero
            .iter()
            .map(|&q| {
                self.vec(q)
                    .iter()
                    .zip(&cvec.words)
                    .map(|(x, y)| (x ^ y).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum();
        FactorPair { b, c, residual }
    }
}

/// FROB of the current matrix with cached block vectors and Gram matrix, so
/// that a candidate swap only re-vectorizes the blocks in the affected block
/// rows and columns.
#[derive(Clone, Debug, Default)]
pub(crate) struct FrobCache {
    dim_b: usize,
    dim_c: usize,
    stride: usize,
    vecs: Vec<u64>,
    weights: Vec<u64>,
    gram: Vec<u64>,
    total: u64,
    changed: Vec<usize>,
    slot: Vec<usize>,
    fresh: Vec<u64>,
    fresh_weights: Vec<u64>,
    writer: BitWriter,
}

const NO_SLOT: usize = usize::MAX;

impl FrobCache {
    fn encode(&mut self, a: &BinaryMatrix, bi: usize, bj: usize) -> u64 {
        let dc = self.dim_c;
        self.writer.reset(dc * dc);
        for r in 0..dc {
            self.writer.push_range(a.row(bi * dc + r), bj * dc, dc);
        }
        self.writer.words.iter().map(|x| x.count_ones() as u64).sum()
    }

    fn dot(x: &[u64], y: &[u64]) -> u64 {
        x.iter().zip(y).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }

    /// Rebuilds the cache for `a` and returns its FROB value.
    pub fn load(&mut self, a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> u64 {
        let nb = dim_b * dim_b;
        self.dim_b = dim_b;
        self.dim_c = dim_c;
        self.stride = (dim_c * dim_c).div_ceil(64);
        self.vecs.clear();
        self.weights.clear();
        for bi in 0..dim_b {
            for bj in 0..dim_b {
                let w = self.encode(a, bi, bj);
                self.weights.push(w);
                self.vecs.extend_from_slice(&self.writer.words);
            }
        }
        self.gram.clear();
        self.gram.resize(nb * nb, 0);
        self.total = 0;
        let st = self.stride;
        for p in 0..nb {
            if self.weights[p] == 0 {
                continue;
            }
            self.gram[p * nb + p] = self.weights[p];
            self.total += self.weights[p] * self.weights[p];
            for q in p + 1..nb {
                if self.weights[q] == 0 {
                    continue;
                }
                let d = Self::dot(&self.vecs[p * st..(p + 1) * st], &self.vecs[q * st..(q + 1) * st]);
                self.gram[p * nb + q] = d;
                self.gram[q * nb + p] = d;
                self.total += 2 * d * d;
            }
        }
        self.slot.clear();
        self.slot.resize(nb, NO_SLOT);
        self.total
    }

    /// FROB after swapping indices `i` and `j`. `a` must be the matrix the
    /// cache was loaded from; it is left unchanged.
    pub fn swapped_value(&mut self, a: &mut BinaryMatrix, i: usize, j: usize) -> u64 {
        let (db, dc, st) = (self.dim_b, self.dim_c, self.stride);
        let nb = db * db;
        let (gi, gj) = (i / dc, j / dc);
        a.swap_in_place(i, j);

        self.changed.clear();
        for g in [gi, gj] {
            for t in 0..db {
                for idx in [g * db + t, t * db + g] {
                    if self.slot[idx] == NO_SLOT {
                        self.slot[idx] = self.changed.len();
                        self.changed.push(idx);
                    }
                }
            }
        }
        self.fresh.clear();
        self.fresh_weights.clear();
        for k in 0..self.changed.len() {
            let idx = self.changed[k];
            let w = self.encode(a, idx / db, idx % db);
            self.fresh_weights.push(w);
            self.fresh.extend_from_slice(&self.writer.words);
        }
        a.swap_in_place(i, j);

        let mut total = self.total as i128;
        for (s, &p) in self.changed.iter().enumerate() {
            let np = &self.fresh[s * st..(s + 1) * st];
            let wp = self.fresh_weights[s];
            for q in 0..nb {
                let old = self.gram[p * nb + q];
                let qs = self.slot[q];
                if qs == NO_SLOT {
                    // pair counted twice in the symmetric sum
                    let new = if self.weights[q] == 0 || wp == 0 {
                        0
                    } else {
                        Self::dot(np, &self.vecs[q * st..(q + 1) * st])
                    };
                    total += 2 * ((new * new) as i128 - (old * old) as i128);
                } else if qs >= s {
                    let new = if qs == s {
                        wp
                    } else if wp == 0 || self.fresh_weights[qs] == 0 {
                        0
                    } else {
                        Self::dot(np, &self.fresh[qs * st..(qs + 1) * st])
                    };
                    let m = if qs == s { 1 } else { 2 };
                    total += m * ((new * new) as i128 - (old * old) as i128);
                }
            }
        }
        for &idx in &self.changed {
            self.slot[idx] = NO_SLOT;
        }
        total as u64
    }
}
