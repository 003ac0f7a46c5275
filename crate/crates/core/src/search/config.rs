use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunables of the alternating local search. Defaults follow the published
/// experiments where a value is given there; the rest are documented choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim_b: usize,
    pub dim_c: usize,
    /// Main-loop iteration cap.
    pub max_iter: usize,
    pub max_restarts: usize,
    /// Every this many restarts the matrix is fully reshuffled.
    pub perturbate_every: usize,
    /// VAR iterations without a new best VAR value before switching to FROB.
    pub metric_switch_stall: usize,
    /// Consecutive FROB iterations whose swap list ran out before the 45%
    /// perturbation fires.
    pub exhaustion_stall: usize,
    pub cornerize_max_iter: usize,
    pub cornerize_target_fraction: f64,
    pub blockfail_perm_fraction: f64,
    pub outsiders_stall_perm_fraction: f64,
    pub cornerize_perm_fraction: f64,
    pub rng_seed: u64,
}

impl SearchConfig {
    pub fn new(dim_b: usize, dim_c: usize) -> Self {
        SearchConfig {
            dim_b,
            dim_c,
            max_iter: 5000,
            max_restarts: 10,
            perturbate_every: 3,
            metric_switch_stall: 20,
            exhaustion_stall: 5,
            cornerize_max_iter: 200,
            cornerize_target_fraction: 0.75,
            blockfail_perm_fraction: 0.75,
            outsiders_stall_perm_fraction: 0.45,
            cornerize_perm_fraction: 0.55,
            rng_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.dim_b * self.dim_c
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim_b", self.dim_b),
            ("dim_c", self.dim_c),
            ("max_iter", self.max_iter),
            ("max_restarts", self.max_restarts),
            ("perturbate_every", self.perturbate_every),
            ("metric_switch_stall", self.metric_switch_stall),
            ("exhaustion_stall", self.exhaustion_stall),
            ("cornerize_max_iter", self.cornerize_max_iter),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        let fractions = [
            ("cornerize_target_fraction", self.cornerize_target_fraction),
            ("blockfail_perm_fraction", self.blockfail_perm_fraction),
            ("outsiders_stall_perm_fraction", self.outsiders_stall_perm_fraction),
            ("cornerize_perm_fraction", self.cornerize_perm_fraction),
        ];
        for (name, f) in fractions {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidConfig(format!("{name} = {f} is outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// Sets one field from its textual `key=value` form. Keys are the field
    /// names; `dimB`/`dimC` are accepted as aliases.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn int(key: &str, v: &str) -> Result<usize> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("{key}: {v:?} is not an integer")))
        }
        fn frac(key: &str, v: &str) -> Result<f64> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("{key}: {v:?} is not a number")))
        }
        match key {
            "dim_b" | "dimB" => self.dim_b = int(key, value)?,
            "dim_c" | "dimC" => self.dim_c = int(key, value)?,
            "max_iter" => self.max_iter = int(key, value)?,
            "max_restarts" => self.max_restarts = int(key, value)?,
            "perturbate_every" => self.perturbate_every = int(key, value)?,
            "metric_switch_stall" => self.metric_switch_stall = int(key, value)?,
            "exhaustion_stall" => self.exhaustion_stall = int(key, value)?,
            "cornerize_max_iter" => self.cornerize_max_iter = int(key, value)?,
            "cornerize_target_fraction" => self.cornerize_target_fraction = frac(key, value)?,
            "blockfail_perm_fraction" => self.blockfail_perm_fraction = frac(key, value)?,
            "outsiders_stall_perm_fraction" => {
                self.outsiders_stall_perm_fraction = frac(key, value)?
            }
            "cornerize_perm_fraction" => self.cornerize_perm_fraction = frac(key, value)?,
            "rng_seed" | "seed" => {
                self.rng_seed = value.parse().map_err(|_| {
                    Error::InvalidConfig(format!("{key}: {value:?} is not a 64-bit integer"))
                })?
            }
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file: one assignment per line, `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }
}
