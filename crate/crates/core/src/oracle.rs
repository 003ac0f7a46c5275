//! Exhaustive ground truth for small matrices.
//!
//! Every symmetric permutation of the input is tried, so the cost is `n!`
//! Kronecker tests; inputs larger than [`DEFAULT_MAX_SIDE`] are refused.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::blocks::check_dims;
use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::metrics::BlockVectors;
use crate::permutation::Permutation;

pub const DEFAULT_MAX_SIDE: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub p: Permutation,
    pub b: BinaryMatrix,
    pub c: BinaryMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub composite: bool,
    /// One witness per distinct `(b, c)`, carrying the lexicographically
    /// smallest permutation that produces it.
    pub witnesses: Vec<Witness>,
}

impl OracleVerdict {
    pub fn contains_factors(&self, b: &BinaryMatrix, c: &BinaryMatrix) -> bool {
        self.witnesses.iter().any(|w| &w.b == b && &w.c == c)
    }
}

/// Rearranges `v` into its lexicographic successor; false on the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

type WitnessMap = BTreeMap<(Vec<String>, Vec<String>), Witness>;

/// Enumerates the permutations whose first entry is `head`, in lexicographic order.
fn scan_prefix(a: &BinaryMatrix, dim_b: usize, dim_c: usize, head: usize) -> WitnessMap {
    let n = a.n();
    let mut found = WitnessMap::new();
    let mut vecs = BlockVectors::default();
    let mut rest: Vec<usize> = (0..n).filter(|&x| x != head).collect();
    loop {
        let mut map = Vec::with_capacity(n);
        map.push(head);
        map.extend_from_slice(&rest);
        let p = Permutation::from_vec(map).expect("valid permutation");
        let m = a.permute_symmetric(&p).expect("sizes agree");
        vecs.load(&m, dim_c, dim_b);
        if vecs.all_nonzero_equal() {
            let f = vecs.nearest_factors();
            let key = (f.b.to_row_strings(), f.c.to_row_strings());
            found.entry(key).or_insert(Witness { p, b: f.b, c: f.c });
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    found
}

/// Tries all `n!` symmetric permutations of `a` for an exact `dim_b ⊗ dim_c`
/// split.
pub fn brute_force_factorize(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<OracleVerdict> {
    brute_force_factorize_guarded(a, dim_b, dim_c, DEFAULT_MAX_SIDE)
}

pub fn brute_force_factorize_guarded(
    a: &BinaryMatrix,
    dim_b: usize,
    dim_c: usize,
    max_side: usize,
) -> Result<OracleVerdict> {
    check_dims(a, dim_b, dim_c)?;
    if a.n() > max_side {
        return Err(Error::OracleTooLarge {
            n: a.n(),
            limit: max_side,
        });
    }
    // prefixes are processed in order, so the first witness kept per key is
    // the lexicographically smallest permutation
    let parts: Vec<WitnessMap> = (0..a.n())
        .into_par_iter()
        .map(|head| scan_prefix(a, dim_b, dim_c, head))
        .collect();
    let mut merged = WitnessMap::new();
    for part in parts {
        for (k, w) in part {
            merged.entry(k).or_insert(w);
        }
    }
    let mut witnesses: Vec<Witness> = merged.into_values().collect();
    witnesses.sort_by(|x, y| x.p.cmp(&y.p));
    Ok(OracleVerdict {
        composite: !witnesses.is_empty(),
        witnesses,
    })
}

/// Ordered nontrivial divisor pairs `(n1, n2)` with `n1 * n2 = n`, by increasing `n1`.
pub fn divisor_splits(n: usize) -> Vec<(usize, usize)> {
    (2..n).filter(|d| n % d == 0).map(|d| (d, n / d)).collect()
}

/// True iff no nontrivial divisor split of `a.n()` admits an exact
/// factorization. Matrices of prime side are prime without enumeration.
pub fn is_prime_for_all_splits(a: &BinaryMatrix) -> Result<bool> {
    let splits = divisor_splits(a.n());
    if splits.is_empty() {
        return Ok(true);
    }
    if a.n() > DEFAULT_MAX_SIDE {
        return Err(Error::OracleTooLarge {
            n: a.n(),
            limit: DEFAULT_MAX_SIDE,
        });
    }
    for (n1, n2) in splits {
        if brute_force_factorize(a, n1, n2)?.composite {
            return Ok(false);
        }
    }
    Ok(true)
}
