use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::oracle::divisor_splits;
use crate::permutation::Permutation;
use crate::search::{alternate_local_search, RunReport, SearchConfig};

use super::instance::{sample_factors, InstanceSpec};

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `tag` of run `(instance, variation)` under a base seed.
pub fn derive_seed(seed: u64, tag: u64, instance: usize, variation: usize) -> u64 {
    seed ^ mix(mix(mix(tag) ^ instance as u64) ^ variation as u64)
}

const FACTOR_STREAM: u64 = 1;
const PERM_STREAM: u64 = 2;
const SOLVER_STREAM: u64 = 3;

/// One solved variation of a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: usize,
    pub variation: usize,
    pub success: bool,
    pub n1: usize,
    pub n2: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub time_s: f64,
    pub p: Permutation,
    pub b: BinaryMatrix,
    pub c: BinaryMatrix,
}

impl RunRecord {
    /// Builds a record, re-verifying any claimed success against `input`.
    pub fn new(instance: usize, variation: usize, input: &BinaryMatrix, report: &RunReport) -> Self {
        let success = report.success && report.verify(input);
        assert_eq!(success, report.success, "solver produced an invalid certificate");
        RunRecord {
            instance,
            variation,
            success,
            n1: report.b.n(),
            n2: report.c.n(),
            iterations: report.iterations,
            restarts: report.restarts,
            time_s: report.wall_time,
            p: report.p.clone(),
            b: report.b.clone(),
            c: report.c.clone(),
        }
    }
}

/// Aggregates over a set of runs. Times cover successful runs only and are
/// `None` when no run succeeded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub runs: usize,
    pub failures: usize,
    pub failure_pct: f64,
    pub t_min: Option<f64>,
    /// Mean over instances of the fastest successful variation.
    pub t_avg_prime: Option<f64>,
    pub t_avg: Option<f64>,
    pub t_max: Option<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

impl BatchStats {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let runs = records.len();
        let failures = records.iter().filter(|r| !r.success).count();
        let times: Vec<f64> = records.iter().filter(|r| r.success).map(|r| r.time_s).collect();
        let mut instances: Vec<usize> = records.iter().map(|r| r.instance).collect();
        instances.sort_unstable();
        instances.dedup();
        let fastest: Vec<f64> = instances
            .iter()
            .filter_map(|&i| {
                records
                    .iter()
                    .filter(|r| r.instance == i && r.success)
                    .map(|r| r.time_s)
                    .reduce(f64::min)
            })
            .collect();
        BatchStats {
            runs,
            failures,
            failure_pct: if runs == 0 {
                0.0
            } else {
                100.0 * failures as f64 / runs as f64
            },
            t_min: times.iter().copied().reduce(f64::min),
            t_avg_prime: mean(&fastest),
            t_avg: mean(&times),
            t_max: times.iter().copied().reduce(f64::max),
        }
    }

    /// `t_min <= t_avg' <= t_avg <= t_max`; vacuous when nothing succeeded.
    pub fn ordering_holds(&self) -> bool {
        match (self.t_min, self.t_avg_prime, self.t_avg, self.t_max) {
            (Some(a), Some(b), Some(c), Some(d)) => {
                let eps = 1e-12;
                a <= b + eps && b <= c + eps && c <= d + eps
            }
            (None, None, None, None) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub spec: InstanceSpec,
    pub instances: usize,
    pub variations: usize,
    pub records: Vec<RunRecord>,
    pub stats: BatchStats,
    /// Mean popcount of the generated matrices.
    pub mean_edges: f64,
}

struct Job {
    instance: usize,
    variation: usize,
    a: BinaryMatrix,
}

/// Generates `n_instances` random `(B, C)` pairs and `n_variations` random
/// permutations of each product, then solves every variation. Records come
/// back in `(instance, variation)` order regardless of scheduling.
pub fn run_batch(
    spec: &InstanceSpec,
    n_instances: usize,
    n_variations: usize,
    cfg: &SearchConfig,
) -> Result<BatchReport> {
    if n_instances == 0 || n_variations == 0 {
        return Err(Error::InvalidConfig("batch needs at least one instance and one variation".into()));
    }
    let mut cfg = cfg.clone();
    cfg.dim_b = spec.dim_b;
    cfg.dim_c = spec.dim_c;
    cfg.validate()?;

    let n = spec.dim_b * spec.dim_c;
    let mut jobs = Vec::with_capacity(n_instances * n_variations);
    let mut edges = 0u64;
    for i in 0..n_instances {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, FACTOR_STREAM, i, 0));
        let (b, c) = sample_factors(spec, &mut rng)?;
        let base = BinaryMatrix::kronecker(&b, &c);
        edges += base.popcount();
        for v in 0..n_variations {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, PERM_STREAM, i, v));
            let p = Permutation::random(n, &mut rng);
            jobs.push(Job {
                instance: i,
                variation: v,
                a: base.permute_symmetric(&p)?,
            });
        }
    }

    let records = jobs
        .par_iter()
        .map(|job| {
            let run_cfg = cfg
                .clone()
                .with_seed(derive_seed(spec.seed, SOLVER_STREAM, job.instance, job.variation));
            let report = alternate_local_search(&job.a, &run_cfg)?;
            Ok(RunRecord::new(job.instance, job.variation, &job.a, &report))
        })
        .collect::<Result<Vec<_>>>()?;

    let stats = BatchStats::from_records(&records);
    Ok(BatchReport {
        spec: spec.clone(),
        instances: n_instances,
        variations: n_variations,
        records,
        stats,
        mean_edges: edges as f64 / n_instances as f64,
    })
}

#[derive(Clone, Debug)]
pub struct SplitReport {
    pub n1: usize,
    pub n2: usize,
    pub report: RunReport,
}

/// Runs the search once for every ordered nontrivial divisor pair of the
/// side of `a`, smallest `n1` first. Prime sides give an empty list.
pub fn solve_all_divisor_splits(a: &BinaryMatrix, cfg: &SearchConfig) -> Result<Vec<SplitReport>> {
    if a.n() < 4 {
        return Err(Error::Precondition(format!(
            "divisor sweep needs a side of at least 4, got {}",
            a.n()
        )));
    }
    divisor_splits(a.n())
        .into_iter()
        .map(|(n1, n2)| {
            let mut c = cfg.clone();
            c.dim_b = n1;
            c.dim_c = n2;
            Ok(SplitReport {
                n1,
                n2,
                report: alternate_local_search(a, &c)?,
            })
        })
        .collect()
}
