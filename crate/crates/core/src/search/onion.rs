//! Corner-first block rearrangement followed by layer-by-layer factorization.
//!
//! Layer `k` (1-based) is the L-shaped set of blocks that grows the leading
//! `(k-1) x (k-1)` block submatrix into the leading `k x k` one. Blocks of
//! settled layers are never moved again.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::blocks::BlockGrid;
use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::metrics::BlockVectors;
use crate::permutation::Permutation;

use super::config::SearchConfig;
use super::perturb::partial_shuffle;

#[derive(Clone, Debug)]
pub struct OnionOutcome {
    pub success: bool,
    /// `a.permute_symmetric(&perm)`.
    pub matrix: BinaryMatrix,
    pub perm: Permutation,
    pub cornerize: CornerizeOutcome,
    /// Number of leading block layers that ended in Kronecker form.
    pub settled_layers: usize,
}

#[derive(Clone, Debug)]
pub struct CornerizeOutcome {
    /// Block-level permutation applied to the occupancy pattern.
    pub block_perm: Permutation,
    pub value: u64,
    pub optimum: u64,
    /// Objective after every accepted step, starting with the initial value.
    /// Strictly increasing between perturbations.
    pub accepted_values: Vec<u64>,
}

/// Weights `(dim_b - max(i, j))³` (0-based), largest in the top-left corner.
pub fn weight_matrix(dim_b: usize) -> Vec<u64> {
    let mut w = Vec::with_capacity(dim_b * dim_b);
    for i in 0..dim_b {
        for j in 0..dim_b {
            w.push(((dim_b - i.max(j)) as u64).pow(3));
        }
    }
    w
}

fn occupancy_value(ef: &[bool], w: &[u64], perm: &[usize], dim_b: usize) -> u64 {
    let mut v = 0;
    for x in 0..dim_b {
        for y in 0..dim_b {
            if ef[perm[x] * dim_b + perm[y]] {
                v += w[x * dim_b + y];
            }
        }
    }
    v
}

/// Hill-climbs block-level symmetric swaps to push occupied blocks towards
/// the top-left corner until the weighted occupancy reaches
/// `cornerize_target_fraction` of the sum of the largest weights.
pub fn cornerize<R: Rng + ?Sized>(
    ef: &[bool],
    dim_b: usize,
    cfg: &SearchConfig,
    rng: &mut R,
) -> CornerizeOutcome {
    let w = weight_matrix(dim_b);
    let filled = ef.iter().filter(|&&f| f).count();
    let mut sorted = w.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let optimum: u64 = sorted.iter().take(filled).sum();

    let mut perm: Vec<usize> = (0..dim_b).collect();
    let mut value = occupancy_value(ef, &w, &perm, dim_b);
    let mut best = (value, perm.clone());
    let mut accepted_values = vec![value];
    let mut pairs: Vec<(usize, usize)> = (0..dim_b)
        .flat_map(|i| (i + 1..dim_b).map(move |j| (i, j)))
        .collect();

    for _ in 0..cfg.cornerize_max_iter {
        if best.0 as f64 >= cfg.cornerize_target_fraction * optimum as f64 {
            break;
        }
        pairs.shuffle(rng);
        let mut improved = false;
        for &(x, y) in &pairs {
            perm.swap(x, y);
            let v = occupancy_value(ef, &w, &perm, dim_b);
            if v > value {
                value = v;
                accepted_values.push(v);
                improved = true;
                break;
            }
            perm.swap(x, y);
        }
        if value > best.0 {
            best = (value, perm.clone());
        }
        if !improved {
            let shake = partial_shuffle(dim_b, cfg.cornerize_perm_fraction, rng);
            perm = shake.as_slice().iter().map(|&k| perm[k]).collect();
            value = occupancy_value(ef, &w, &perm, dim_b);
        }
    }

    // the target is not always reachable; keep the best arrangement seen
    let (value, perm) = best;
    CornerizeOutcome {
        block_perm: Permutation::from_vec(perm).expect("block permutation"),
        value,
        optimum,
        accepted_values,
    }
}

/// Expands a block-level permutation to matrix indices.
pub(crate) fn expand_block_perm(block_perm: &Permutation, dim_c: usize) -> Permutation {
    let map = block_perm
        .as_slice()
        .iter()
        .flat_map(|&g| (0..dim_c).map(move |r| g * dim_c + r))
        .collect();
    Permutation::from_vec(map).expect("expanded block permutation")
}

/// FROB hill climb on the leading `layer x layer` block submatrix with swaps
/// limited to indices of groups `settled..layer`. Succeeds once that
/// submatrix is in Kronecker form.
fn layer_search<R: Rng + ?Sized>(
    a: &mut BinaryMatrix,
    perm: &mut Permutation,
    layer: usize,
    settled: usize,
    cfg: &SearchConfig,
    rng: &mut R,
    vecs: &mut BlockVectors,
) -> bool {
    let dim_c = cfg.dim_c;
    vecs.load(a, dim_c, layer);
    if vecs.all_nonzero_equal() {
        return true;
    }
    let mut current = vecs.frob();
    let (lo, hi) = (settled * dim_c, layer * dim_c);
    let mut pairs: Vec<(usize, usize)> = (lo..hi)
        .flat_map(|i| (i + 1..hi).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);

    let mut cursor = 0;
    for _ in 0..cfg.max_iter {
        let mut improved = false;
        for step in 0..pairs.len() {
            let (i, j) = pairs[(cursor + step) % pairs.len()];
            a.swap_in_place(i, j);
            vecs.load(a, dim_c, layer);
            let v = vecs.frob();
            if v > current {
                current = v;
                perm.swap(i, j);
                cursor = (cursor + step + 1) % pairs.len();
                improved = true;
                break;
            }
            a.swap_in_place(i, j);
        }
        if !improved {
            return false;
        }
        if vecs.all_nonzero_equal() {
            return true;
        }
    }
    false
}

/// Rearranges a balanced block matrix corner-first, then factorizes it layer
/// by layer using the leading block as template.
pub fn onion_search<R: Rng + ?Sized>(
    a: &BinaryMatrix,
    cfg: &SearchConfig,
    rng: &mut R,
) -> Result<OnionOutcome> {
    let (dim_b, dim_c) = (cfg.dim_b, cfg.dim_c);
    let grid = BlockGrid::new(a, dim_b, dim_c)?;
    if !grid.is_block_matrix() || !grid.balanced_blocks() {
        return Err(Error::Precondition(
            "onion search needs a balanced block matrix".into(),
        ));
    }

    let corner = cornerize(&grid.occupancy(), dim_b, cfg, rng);
    let mut perm = expand_block_perm(&corner.block_perm, dim_c);
    let mut m = a.permute_symmetric(&perm)?;

    let mut vecs = BlockVectors::default();
    let mut settled = 1;
    let mut success = dim_b == 1;
    for layer in 2..=dim_b {
        success = layer_search(&mut m, &mut perm, layer, settled, cfg, rng, &mut vecs);
        if success {
            settled = layer;
        }
    }
    if dim_b == 1 {
        vecs.load(&m, dim_c, 1);
        success = vecs.all_nonzero_equal();
    }

    Ok(OnionOutcome {
        success,
        matrix: m,
        perm,
        cornerize: corner,
        settled_layers: settled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::is_exact_kronecker;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weights_for_five_blocks() {
        let w = weight_matrix(5);
        assert_eq!(&w[..5], &[125, 64, 27, 8, 1]);
        assert_eq!(w[6], 64);
        assert_eq!(w[12], 27);
        assert_eq!(w[4 * 5 + 2], 1);
        // symmetric, constant along each onion layer
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(w[i * 5 + j], w[j * 5 + i]);
                assert_eq!(w[i * 5 + j], (6 - (i.max(j) as u64 + 1)).pow(3));
            }
        }
    }

    /// Sparse five-block occupancy pattern, given as EF[row][col] from
    /// (column, row) node coordinates.
    fn sample_occupancy() -> Vec<bool> {
        let mut ef = vec![false; 25];
        for i in 1..=5usize {
            for j in 1..=5usize {
                let on = (i < 3 && j == 3)
                    || (i == 2 && j == 5)
                    || (i == 3 && j > 3)
                    || (i == 4 && j < 5)
                    || (i == 5 && j > 1 && j < 4);
                ef[(j - 1) * 5 + (i - 1)] = on;
            }
        }
        ef
    }

    fn best_arrangement(ef: &[bool], dim_b: usize) -> u64 {
        let w = weight_matrix(dim_b);
        let mut perm: Vec<usize> = (0..dim_b).collect();
        let mut best = 0;
        loop {
            best = best.max(occupancy_value(ef, &w, &perm, dim_b));
            let Some(i) = perm.windows(2).rposition(|x| x[0] < x[1]) else {
                return best;
            };
            let j = perm.iter().rposition(|&x| x > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
    }

    #[test]
    fn sample_occupancy_finds_best_reachable_arrangement() {
        let ef = sample_occupancy();
        assert_eq!(ef.iter().filter(|&&f| f).count(), 11);
        // the target fraction is out of reach for this pattern
        let reachable = best_arrangement(&ef, 5);
        assert_eq!(reachable, 341);
        let cfg = SearchConfig::new(5, 4);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = cornerize(&ef, 5, &cfg, &mut rng);
            assert_eq!(out.optimum, 468);
            assert_eq!(out.value, reachable, "seed {seed}");
            let w = weight_matrix(5);
            assert_eq!(occupancy_value(&ef, &w, out.block_perm.as_slice(), 5), out.value);
        }
    }

    #[test]
    fn scrambled_corner_pattern_reaches_target() {
        // lower-left staircase under a random block order
        let dim_b = 6;
        let cfg = SearchConfig::new(dim_b, 2);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = Permutation::random(dim_b, &mut rng);
            let o = order.as_slice();
            let mut ef = vec![false; dim_b * dim_b];
            for i in 0..dim_b {
                for j in 0..dim_b {
                    ef[o[i] * dim_b + o[j]] = i + j < dim_b;
                }
            }
            let out = cornerize(&ef, dim_b, &cfg, &mut rng);
            assert!(out.value as f64 >= 0.75 * out.optimum as f64, "seed {seed}: {out:?}");
            assert!(out.accepted_values.windows(2).all(|x| x[1] > x[0]));
        }
    }

    #[test]
    fn cornered_product_is_a_no_op_then_solved() {
        let b = BinaryMatrix::from_row_strings(&["111", "110", "100"]).unwrap();
        let c = BinaryMatrix::from_row_strings(&["0110", "1000", "0011", "0100"]).unwrap();
        // scramble inside every group with independent orders: blocks stay
        // balanced but stop matching each other
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut map = Vec::new();
        for g in 0..3 {
            let inner = Permutation::random(4, &mut rng);
            map.extend(inner.as_slice().iter().map(|&r| g * 4 + r));
        }
        let a = BinaryMatrix::kronecker(&b, &c)
            .permute_symmetric(&Permutation::from_vec(map).unwrap())
            .unwrap();
        let cfg = SearchConfig::new(3, 4);
        let out = onion_search(&a, &cfg, &mut rng).unwrap();
        assert!(out.cornerize.block_perm.is_identity());
        assert!(out.success);
        assert!(is_exact_kronecker(&out.matrix, 3, 4).unwrap());
        assert_eq!(a.permute_symmetric(&out.perm).unwrap(), out.matrix);
    }

    #[test]
    fn rejects_non_block_input() {
        let a = BinaryMatrix::from_fn(6, |i, j| (i + j) % 2 == 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a2 = a.clone();
        a2.set(0, 0, false);
        let cfg = SearchConfig::new(2, 3);
        assert!(matches!(onion_search(&a2, &cfg, &mut rng), Err(Error::Precondition(_))));
    }

    #[test]
    fn incompatible_blocks_fail() {
        // two nonzero blocks with equal counts but different row-sum profiles:
        // no within-group reordering can make them equal
        let mut a = BinaryMatrix::zeros(6);
        for (i, j) in [(0, 0), (0, 1), (1, 2)] {
            a.set(i, j, true);
        }
        for (i, j) in [(3, 3), (4, 4), (5, 5)] {
            a.set(i, j, true);
        }
        let cfg = SearchConfig::new(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = onion_search(&a, &cfg, &mut rng).unwrap();
        assert!(!out.success);
        assert_eq!(a.permute_symmetric(&out.perm).unwrap(), out.matrix);
    }
}
