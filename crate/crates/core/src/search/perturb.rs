use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::permutation::Permutation;

/// Number of indices moved by a perturbation of `fraction` of `n` indices:
/// `ceil(fraction * n)`, at least 1.
pub(crate) fn moved_count(n: usize, fraction: f64) -> usize {
    // the epsilon keeps e.g. 0.55 * 20 from rounding up to 12
    let k = (fraction * n as f64 - 1e-9).ceil();
    (k.max(1.0) as usize).min(n)
}

/// Picks `ceil(fraction * n)` indices uniformly without replacement and
/// shuffles them among themselves; all other indices stay fixed.
pub(crate) fn partial_shuffle<R: Rng + ?Sized>(n: usize, fraction: f64, rng: &mut R) -> Permutation {
    let k = moved_count(n, fraction);
    let mut chosen = index::sample(rng, n, k).into_vec();
    chosen.sort_unstable();
    let mut targets = chosen.clone();
    targets.shuffle(rng);
    let mut map: Vec<usize> = (0..n).collect();
    for (&slot, &src) in chosen.iter().zip(&targets) {
        map[slot] = src;
    }
    Permutation::from_vec(map).expect("partial shuffle is a bijection")
}

/// Symmetrically permutes a random `fraction` of the indices of `a`.
/// `fraction = 1` is a full uniform reshuffle.
pub fn random_perturbation<R: Rng + ?Sized>(
    a: &BinaryMatrix,
    fraction: f64,
    rng: &mut R,
) -> Result<(BinaryMatrix, Permutation)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "perturbation fraction {fraction} is outside (0, 1]"
        )));
    }
    let p = partial_shuffle(a.n(), fraction, rng);
    Ok((a.permute_symmetric(&p)?, p))
}
