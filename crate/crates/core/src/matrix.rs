//! Dense square 0/1 matrices stored as packed bit rows.

use std::fmt;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Mask with the low `len` bits set (`len <= 64`).
#[inline]
fn low_mask(len: usize) -> u64 {
    if len >= WORD {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Reads `len <= 64` bits of a packed row starting at bit `start`.
#[inline]
pub(crate) fn read_bits(row: &[u64], start: usize, len: usize) -> u64 {
    debug_assert!(len <= WORD);
    if len == 0 {
        return 0;
    }
    let w = start / WORD;
    let off = start % WORD;
    let mut v = row[w] >> off;
    if off + len > WORD {
        v |= row[w + 1] << (WORD - off);
    }
    v & low_mask(len)
}

/// Number of set bits of a packed row in `[start, start + len)`.
#[inline]
pub(crate) fn count_bits(row: &[u64], start: usize, len: usize) -> u32 {
    let mut total = 0;
    let mut pos = start;
    let end = start + len;
    while pos < end {
        let take = (end - pos).min(WORD - pos % WORD);
        total += read_bits(row, pos, take).count_ones();
        pos += take;
    }
    total
}

/// Append-only packed bit buffer, used to vectorize blocks.
#[derive(Clone, Debug, Default)]
pub(crate) struct BitWriter {
    pub words: Vec<u64>,
    len: usize,
}

impl BitWriter {
    pub fn reset(&mut self, capacity_bits: usize) {
        self.words.clear();
        self.words.resize(words_for(capacity_bits), 0);
        self.len = 0;
    }

    /// Copies `len` bits of `row` starting at `start` onto the end of the buffer.
    pub fn push_range(&mut self, row: &[u64], start: usize, len: usize) {
        let mut pos = start;
        let end = start + len;
        while pos < end {
            let take = (end - pos).min(WORD - pos % WORD);
            self.push(read_bits(row, pos, take), take);
            pos += take;
        }
    }

    #[inline]
    fn push(&mut self, value: u64, len: usize) {
        if len == 0 {
            return;
        }
        let w = self.len / WORD;
        let off = self.len % WORD;
        self.words[w] |= value << off;
        if off + len > WORD {
            self.words[w + 1] |= value >> (WORD - off);
        }
        self.len += len;
    }
}

/// Square binary matrix. Row `i` occupies `stride` consecutive words; bit `j`
/// of the row is entry `(i, j)`. Padding bits past `n` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix side must be positive");
        let stride = words_for(n);
        BinaryMatrix {
            n,
            stride,
            words: vec![0; n * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values. Every row must have the same
    /// length as the number of rows.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Precondition("matrix must have at least one row".into()));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("entry {other} is not binary"),
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        (self.words[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        let w = &mut self.words[i * self.stride + j / WORD];
        let bit = 1u64 << (j % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn popcount(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Fraction of entries equal to 1.
    pub fn density(&self) -> f64 {
        self.popcount() as f64 / (self.n * self.n) as f64
    }

    pub fn row_sum(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    pub fn col_sum(&self, j: usize) -> u32 {
        (0..self.n).filter(|&i| self.get(i, j)).count() as u32
    }

    /// Number of ones of row `i` among columns `[start, start + len)`.
    #[inline]
    pub(crate) fn row_segment_count(&self, i: usize, start: usize, len: usize) -> u32 {
        count_bits(self.row(i), start, len)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in self.ones_in_row(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn ones_in_row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * WORD + b)
                }
            })
        })
    }

    /// Number of entries where `self` and `other` differ.
    pub fn hamming(&self, other: &BinaryMatrix) -> Result<u64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum())
    }

    /// Kronecker product: entry `(i*nc + p, j*nc + q)` is `b[i][j] & c[p][q]`.
    pub fn kronecker(b: &BinaryMatrix, c: &BinaryMatrix) -> BinaryMatrix {
        let nc = c.n;
        let mut a = BinaryMatrix::zeros(b.n * nc);
        for i in 0..b.n {
            for j in b.ones_in_row(i) {
                for p in 0..nc {
                    for q in c.ones_in_row(p) {
                        a.set(i * nc + p, j * nc + q, true);
                    }
                }
            }
        }
        a
    }

    /// `result[i][j] = self[p[i]][p[j]]`, i.e. `Pᵀ A P` for the permutation
    /// matrix of `p`.
    pub fn permute_symmetric(&self, p: &Permutation) -> Result<BinaryMatrix> {
        if p.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: p.len(),
            });
        }
        let map = p.as_slice();
        let mut inv = vec![0usize; self.n];
        for (i, &src) in map.iter().enumerate() {
            inv[src] = i;
        }
        let mut out = BinaryMatrix::zeros(self.n);
        for (i, &src_row) in map.iter().enumerate() {
            for src_col in self.ones_in_row(src_row) {
                out.set(i, inv[src_col], true);
            }
        }
        Ok(out)
    }

    /// Copy with rows `i, j` and columns `i, j` exchanged.
    pub fn swap_pair(&self, i: usize, j: usize) -> Result<BinaryMatrix> {
        for idx in [i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, n: self.n });
            }
        }
        if i == j {
            return Err(Error::DegenerateSwap(i));
        }
        let mut out = self.clone();
        out.swap_in_place(i, j);
        Ok(out)
    }

    /// In-place symmetric transposition of indices `i` and `j`. A no-op when
    /// `i == j`. Indices are not range-checked beyond debug assertions.
    pub fn swap_in_place(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.n && j < self.n);
        if i == j {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let (head, tail) = self.words.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);

        let (wi, bi) = (i / WORD, i % WORD);
        let (wj, bj) = (j / WORD, j % WORD);
        for r in 0..self.n {
            let base = r * s;
            let vi = (self.words[base + wi] >> bi) & 1;
            let vj = (self.words[base + wj] >> bj) & 1;
            if vi != vj {
                self.words[base + wi] ^= 1 << bi;
                self.words[base + wj] ^= 1 << bj;
            }
        }
    }

    /// Leading `k x k` principal submatrix.
    pub fn leading(&self, k: usize) -> BinaryMatrix {
        assert!(k >= 1 && k <= self.n);
        let mut out = BinaryMatrix::zeros(k);
        for i in 0..k {
            for j in self.ones_in_row(i).take_while(|&j| j < k) {
                out.set(i, j, true);
            }
        }
        out
    }

    /// Rows rendered as strings of `0`/`1`.
    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<BinaryMatrix> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .enumerate()
            .map(|(line, r)| parse_bit_row(r.as_ref(), line + 1))
            .collect::<Result<_>>()?;
        BinaryMatrix::from_rows(&parsed)
    }

    /// Text format: side length on the first line, then one line of `n`
    /// characters from `{0,1}` per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for row in self.to_row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<BinaryMatrix> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line: first_line,
            msg: format!("expected side length, found {header:?}"),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: first_line,
                msg: "side length must be positive".into(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for (line, l) in lines.by_ref().take(n) {
            let row = parse_bit_row(l, line)?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: first_line,
                msg: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "trailing data after matrix".into(),
            });
        }
        BinaryMatrix::from_rows(&rows)
    }
}

fn parse_bit_row(s: &str, line: usize) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse {
                line,
                msg: format!("unexpected character {other:?}"),
            }),
        })
        .collect()
}

impl serde::Serialize for BinaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.to_row_strings())
    }
}

impl<'de> serde::Deserialize<'de> for BinaryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <Vec<String> as serde::Deserialize>::deserialize(d)?;
        BinaryMatrix::from_row_strings(&rows).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix({})", self.n)?;
        for row in self.to_row_strings() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_row_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BinaryMatrix {
        BinaryMatrix::from_row_strings(rows).unwrap()
    }

    #[test]
    fn kronecker_with_unit_factor_is_identity_map() {
        let c = m(&["010", "110", "010"]);
        let one = BinaryMatrix::ones(1);
        assert_eq!(BinaryMatrix::kronecker(&one, &c), c);
        assert_eq!(BinaryMatrix::kronecker(&c, &one), c);
    }

    #[test]
    fn swap_pair_hand_example() {
        let a = m(&["010", "001", "100"]);
        assert_eq!(a.swap_pair(0, 1).unwrap(), m(&["001", "100", "010"]));
    }

    #[test]
    fn swap_pair_errors() {
        let a = BinaryMatrix::identity(3);
        assert!(matches!(a.swap_pair(0, 3), Err(Error::IndexOutOfRange { index: 3, .. })));
        assert!(matches!(a.swap_pair(1, 1), Err(Error::DegenerateSwap(1))));
    }

    #[test]
    fn identity_is_a_swap_fixed_point() {
        let a = BinaryMatrix::identity(7);
        for (i, j) in [(0, 1), (2, 6), (5, 3)] {
            assert_eq!(a.swap_pair(i, j).unwrap(), a);
        }
    }

    #[test]
    fn reversal_permutation() {
        let a = m(&["1100", "0010", "1001", "0111"]);
        let p = Permutation::from_vec(vec![3, 2, 1, 0]).unwrap();
        let r = a.permute_symmetric(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(r.get(i, j), a.get(3 - i, 3 - j));
            }
        }
    }

    #[test]
    fn permute_size_mismatch() {
        let a = BinaryMatrix::identity(4);
        let p = Permutation::identity(3);
        assert!(matches!(a.permute_symmetric(&p), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn bit_reads_cross_word_boundaries() {
        let n = 130;
        let a = BinaryMatrix::from_fn(n, |i, j| (i * 7 + j * 3) % 5 == 0);
        for start in [0, 1, 60, 63, 64, 100, 125] {
            let len = (n - start).min(17);
            let expected = (start..start + len).filter(|&j| a.get(2, j)).count() as u32;
            assert_eq!(a.row_segment_count(2, start, len), expected);
            let bits = read_bits(a.row(2), start, len);
            for t in 0..len {
                assert_eq!((bits >> t) & 1 == 1, a.get(2, start + t));
            }
        }
        assert_eq!(count_bits(a.row(5), 3, 120), (3..123).filter(|&j| a.get(5, j)).count() as u32);
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let a = m(&["010", "110", "010"]);
        let text = a.to_text();
        assert_eq!(text, "3\n010\n110\n010\n");
        assert_eq!(BinaryMatrix::parse_text(&text).unwrap(), a);
        assert!(BinaryMatrix::parse_text("2\n01\n").is_err());
        assert!(BinaryMatrix::parse_text("2\n01\n2a\n").is_err());
        assert!(BinaryMatrix::parse_text("2\n011\n00\n").is_err());
        assert!(BinaryMatrix::parse_text("").is_err());
    }

    #[test]
    fn transpose_and_sums() {
        let a = m(&["0110", "0001", "1000", "1111"]);
        let t = a.transpose();
        for i in 0..4 {
            assert_eq!(a.row_sum(i), t.col_sum(i));
            for j in 0..4 {
                assert_eq!(a.get(i, j), t.get(j, i));
            }
        }
        assert_eq!(a.popcount(), 8);
        assert_eq!(a.density(), 0.5);
    }

    #[test]
    fn bitwriter_concatenates_segments() {
        let a = BinaryMatrix::from_fn(70, |i, j| (i + j) % 3 == 0);
        let mut w = BitWriter::default();
        w.reset(3 * 40);
        for r in 0..3 {
            w.push_range(a.row(r), 25, 40);
        }
        for r in 0..3 {
            for t in 0..40 {
                let bit = (w.words[(r * 40 + t) / 64] >> ((r * 40 + t) % 64)) & 1 == 1;
                assert_eq!(bit, a.get(r, 25 + t));
            }
        }
    }
}
