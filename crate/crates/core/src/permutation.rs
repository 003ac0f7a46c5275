use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Bijection on `{0..n-1}` stored as an index vector. Applied to a matrix
/// through [`BinaryMatrix::permute_symmetric`], which moves source index
/// `map[i]` to position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(Error::InvalidPermutation(format!("index {v} >= length {n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("index {v} repeated")));
            }
        }
        Ok(Permutation { map })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.map.swap(i, j);
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Permutation equivalent to applying `self` and then `next`:
    /// `a.permute(self).permute(next) == a.permute(self.then(next))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.len(), next.len(), "permutation length mismatch");
        Permutation {
            map: next.map.iter().map(|&k| self.map[k]).collect(),
        }
    }

    /// In-place equivalent of `self.then(&transposition(i, j))`.
    #[inline]
    pub fn swap(&mut self, i: usize, j: usize) {
        self.map.swap(i, j);
    }

    /// Permutation matrix with `P[map[i]][i] = 1`, so that
    /// `Pᵀ A P == a.permute_symmetric(self)`.
    pub fn to_matrix(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.map.len().max(1));
        for (i, &v) in self.map.iter().enumerate() {
            m.set(v, i, true);
        }
        m
    }

    pub fn from_matrix(m: &BinaryMatrix) -> Result<Self> {
        let n = m.n();
        let mut map = vec![usize::MAX; n];
        for col in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| m.get(r, col)).collect();
            if rows.len() != 1 {
                return Err(Error::InvalidPermutation(format!(
                    "column {col} has {} ones",
                    rows.len()
                )));
            }
            map[col] = rows[0];
        }
        Self::from_vec(map)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_vec(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_vec(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_vec(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_vec(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn matrix_form_round_trips_and_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Permutation::random(6, &mut rng);
        let pm = p.to_matrix();
        assert_eq!(Permutation::from_matrix(&pm).unwrap(), p);

        let a = BinaryMatrix::from_fn(6, |i, j| (i * 5 + j * 2) % 3 == 1);
        // Pᵀ A P computed with plain boolean matrix products.
        let prod = |x: &BinaryMatrix, y: &BinaryMatrix| {
            BinaryMatrix::from_fn(6, |i, j| (0..6).any(|k| x.get(i, k) && y.get(k, j)))
        };
        let conj = prod(&prod(&pm.transpose(), &a), &pm);
        assert_eq!(conj, a.permute_symmetric(&p).unwrap());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = BinaryMatrix::from_fn(8, |i, j| (i * i + 3 * j) % 4 == 0);
        let p = Permutation::random(8, &mut rng);
        let q = Permutation::random(8, &mut rng);
        let seq = a.permute_symmetric(&p).unwrap().permute_symmetric(&q).unwrap();
        assert_eq!(seq, a.permute_symmetric(&p.then(&q)).unwrap());
        assert_eq!(
            a.permute_symmetric(&p).unwrap().permute_symmetric(&p.inverse()).unwrap(),
            a
        );
    }

    #[test]
    fn serde_validates() {
        let p: Permutation = serde_json::from_str("[2,0,1]").unwrap();
        assert_eq!(p.as_slice(), &[2, 0, 1]);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }
}
