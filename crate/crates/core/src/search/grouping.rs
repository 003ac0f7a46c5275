//! Similarity-driven initial grouping of rows/columns into blocks.

use crate::blocks::check_dims;
use crate::error::Result;
use crate::matrix::BinaryMatrix;
use crate::metrics::BlockVectors;
use crate::permutation::Permutation;

/// Row-combination weights `w = k / 5` for `k = 0..=5`.
pub const GROUPING_STEPS: u32 = 5;

/// One grouping candidate: the permutation built for weight `k / 5` and the
/// FROB value of the permuted matrix.
#[derive(Clone, Debug)]
pub struct GroupingCandidate {
    pub weight_step: u32,
    pub perm: Permutation,
    pub frob: u64,
}

/// Pairwise agreement counts (matching ones plus matching zeros) between
/// the rows of `m`; zero on the diagonal.
fn agreement(m: &BinaryMatrix) -> Vec<u32> {
    let n = m.n();
    let mut s = vec![0u32; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let diff: u32 = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .map(|(x, y)| (x ^ y).count_ones())
                .sum();
            let v = n as u32 - diff;
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    s
}

/// Greedy grouping: take the first unused index as pivot and append its
/// `dim_c - 1` most similar unused indices (lowest index wins ties).
fn greedy_groups(sim: &[u64], n: usize, dim_c: usize) -> Permutation {
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    while order.len() < n {
        let pivot = used.iter().position(|u| !u).expect("unused index remains");
        used[pivot] = true;
        order.push(pivot);
        candidates.clear();
        candidates.extend((0..n).filter(|&x| !used[x]));
        let row = &sim[pivot * n..(pivot + 1) * n];
        candidates.sort_by(|&x, &y| row[y].cmp(&row[x]).then(x.cmp(&y)));
        for &x in candidates.iter().take(dim_c - 1) {
            used[x] = true;
            order.push(x);
        }
    }
    Permutation::from_vec(order).expect("greedy grouping visits every index once")
}

/// All six weighted candidates, in increasing row weight.
pub fn grouping_candidates(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<Vec<GroupingCandidate>> {
    check_dims(a, dim_b, dim_c)?;
    let n = a.n();
    let mr = agreement(a);
    let mc = agreement(&a.transpose());
    let mut vecs = BlockVectors::default();
    let mut sim = vec![0u64; n * n];
    let mut out = Vec::with_capacity(GROUPING_STEPS as usize + 1);
    for k in 0..=GROUPING_STEPS {
        for ((s, &r), &c) in sim.iter_mut().zip(&mr).zip(&mc) {
            *s = k as u64 * r as u64 + (GROUPING_STEPS - k) as u64 * c as u64;
        }
        let perm = greedy_groups(&sim, n, dim_c);
        vecs.load(&a.permute_symmetric(&perm)?, dim_c, dim_b);
        out.push(GroupingCandidate {
            weight_step: k,
            perm,
            frob: vecs.frob(),
        });
    }
    Ok(out)
}

/// Regroups `a` so that similar rows/columns share a block. Returns the
/// permuted matrix and its permutation; the candidate with the largest FROB
/// value wins, the lowest weight on ties.
pub fn kron_grouping(a: &BinaryMatrix, dim_b: usize, dim_c: usize) -> Result<(BinaryMatrix, Permutation)> {
    let candidates = grouping_candidates(a, dim_b, dim_c)?;
    let best = candidates
        .into_iter()
        .reduce(|best, c| if c.frob > best.frob { c } else { best })
        .expect("six candidates");
    Ok((a.permute_symmetric(&best.perm)?, best.perm))
}
