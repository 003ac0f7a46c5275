use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::permutation::Permutation;

const RESAMPLE_BUDGET: usize = 1000;

/// Parameters of a random composite instance `A = Pᵀ (B ⊗ C) P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim_b: usize,
    pub dim_c: usize,
    pub rho_b: f64,
    pub rho_c: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(dim_b: usize, dim_c: usize, rho_b: f64, rho_c: f64, seed: u64) -> Self {
        InstanceSpec {
            dim_b,
            dim_c,
            rho_b,
            rho_c,
            seed,
        }
    }

    /// Expected density of `A`.
    pub fn rho_a(&self) -> f64 {
        self.rho_b * self.rho_c
    }

    /// Side ratio `dim_c / dim_b`.
    pub fn alpha(&self) -> f64 {
        self.dim_c as f64 / self.dim_b as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_b == 0 || self.dim_c == 0 {
            return Err(Error::InvalidConfig("factor sides must be positive".into()));
        }
        for (name, rho) in [("rho_b", self.rho_b), ("rho_c", self.rho_c)] {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} = {rho} is outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// The factorization an instance was built from. Used only to check results.
#[derive(Clone, Debug, PartialEq)]
pub struct Hidden {
    pub p: Permutation,
    pub b: BinaryMatrix,
    pub c: BinaryMatrix,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub a: BinaryMatrix,
    pub hidden: Hidden,
}

/// Entrywise Bernoulli(`rho`) matrix, resampled while entirely zero.
pub fn sample_factor<R: Rng + ?Sized>(side: usize, rho: f64, rng: &mut R) -> Result<BinaryMatrix> {
    for _ in 0..RESAMPLE_BUDGET {
        let m = BinaryMatrix::from_fn(side, |_, _| rng.gen_bool(rho));
        if m.popcount() > 0 {
            return Ok(m);
        }
    }
    Err(Error::DegenerateDensity(RESAMPLE_BUDGET))
}

pub(crate) fn sample_factors<R: Rng + ?Sized>(
    spec: &InstanceSpec,
    rng: &mut R,
) -> Result<(BinaryMatrix, BinaryMatrix)> {
    spec.validate()?;
    let b = sample_factor(spec.dim_b, spec.rho_b, rng)?;
    let c = sample_factor(spec.dim_c, spec.rho_c, rng)?;
    Ok((b, c))
}

/// Random `B`, `C` and `P` from `spec.seed`; returns `Pᵀ (B ⊗ C) P` together
/// with the hidden triple.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (b, c) = sample_factors(spec, &mut rng)?;
    let p = Permutation::random(spec.dim_b * spec.dim_c, &mut rng);
    let a = BinaryMatrix::kronecker(&b, &c).permute_symmetric(&p)?;
    Ok(Instance {
        a,
        hidden: Hidden { p, b, c },
    })
}
