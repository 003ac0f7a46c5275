//! The main alternating VAR/FROB swap search.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::{check_dims, fill_counts, BlockGrid};
use crate::error::Result;
use crate::matrix::BinaryMatrix;
use crate::metrics::{BlockVectors, FrobCache, MetricKind};
use crate::permutation::Permutation;

use super::config::SearchConfig;
use super::grouping::kron_grouping;
use super::onion::onion_search;
use super::outsiders::{outsiders, Outsiders};
use super::perturb::partial_shuffle;

/// Mutable state of one search. `best_a` always equals
/// `input.permute_symmetric(&cumulative_p)`.
#[derive(Clone, Debug)]
pub struct SearchState {
    pub best_a: BinaryMatrix,
    pub cumulative_p: Permutation,
    pub metric: MetricKind,
    pub iter: usize,
    pub n_restarts: usize,
    pub block_matrix: bool,
    pub cornerized_matrix: bool,
}

/// Outcome of one solve. When `success` is set,
/// `input.permute_symmetric(&p) == kronecker(&b, &c)` bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub success: bool,
    pub p: Permutation,
    pub b: BinaryMatrix,
    pub c: BinaryMatrix,
    /// Hamming distance between the final permuted matrix and `b ⊗ c`.
    pub residual: u64,
    pub iterations: usize,
    pub restarts: usize,
    /// Seconds, monotonic clock.
    pub wall_time: f64,
}

impl RunReport {
    /// Re-checks the certificate against the original input.
    pub fn verify(&self, input: &BinaryMatrix) -> bool {
        match input.permute_symmetric(&self.p) {
            Ok(m) => m == BinaryMatrix::kronecker(&self.b, &self.c),
            Err(_) => false,
        }
    }
}

/// Observation points exposed for tests and diagnostics.
#[derive(Debug)]
pub enum SearchEvent<'a> {
    /// A swap was accepted under `metric`, moving its value from `before` to `after`.
    Accepted {
        metric: MetricKind,
        before: u64,
        after: u64,
    },
    /// A random perturbation (followed by regrouping) was applied.
    Perturbed { fraction: f64 },
    OnionSearch { success: bool },
    /// End of a main-loop iteration.
    Iteration(&'a SearchState),
}

/// Below this many block rows a swap touches about half of all block pairs
/// and recomputing FROB from scratch is as fast as the cached update.
const CACHE_MIN_DIM_B: usize = 8;

/// Evaluates objective values of the current matrix and of single swaps.
/// VAR is represented by the sum of squared block counts, which orders
/// matrices with equal popcount exactly as the variance does.
struct Scorer {
    dim_b: usize,
    dim_c: usize,
    counts: Vec<u64>,
    vecs: BlockVectors,
    frob: FrobCache,
}

impl Scorer {
    fn new(dim_b: usize, dim_c: usize) -> Self {
        Scorer {
            dim_b,
            dim_c,
            counts: vec![0; dim_b * dim_b],
            vecs: BlockVectors::default(),
            frob: FrobCache::default(),
        }
    }

    fn value(&mut self, a: &BinaryMatrix, metric: MetricKind) -> u64 {
        match metric {
            MetricKind::Var => {
                fill_counts(a, self.dim_b, self.dim_c, &mut self.counts);
                self.counts.iter().map(|&s| s * s).sum()
            }
            MetricKind::Frob if self.dim_b >= CACHE_MIN_DIM_B => self.frob.load(a, self.dim_b, self.dim_c),
            MetricKind::Frob => {
                self.vecs.load(a, self.dim_c, self.dim_b);
                self.vecs.frob()
            }
        }
    }

    /// Value after swapping `i` and `j`; `a` must be the matrix last passed
    /// to [`Scorer::value`] with the same metric.
    fn swapped_value(&mut self, a: &mut BinaryMatrix, i: usize, j: usize, metric: MetricKind) -> u64 {
        match metric {
            MetricKind::Var => {
                let (db, dc) = (self.dim_b, self.dim_c);
                let (gi, gj) = (i / dc, j / dc);
                let block = |a: &BinaryMatrix, bi: usize, bj: usize| -> u64 {
                    (0..dc)
                        .map(|r| a.row_segment_count(bi * dc + r, bj * dc, dc) as u64)
                        .sum()
                };
                let touched = |bi: usize, bj: usize| bi == gi || bi == gj || bj == gi || bj == gj;
                let mut old = 0u64;
                for bi in 0..db {
                    for bj in 0..db {
                        if touched(bi, bj) {
                            old += self.counts[bi * db + bj].pow(2);
                        }
                    }
                }
                a.swap_in_place(i, j);
                let mut new = 0u64;
                for bi in 0..db {
                    for bj in 0..db {
                        if touched(bi, bj) {
                            new += block(a, bi, bj).pow(2);
                        }
                    }
                }
                a.swap_in_place(i, j);
                let total: u64 = self.counts.iter().map(|&s| s * s).sum();
                total - old + new
            }
            MetricKind::Frob if self.dim_b >= CACHE_MIN_DIM_B => self.frob.swapped_value(a, i, j),
            MetricKind::Frob => {
                a.swap_in_place(i, j);
                let v = self.value(a, metric);
                a.swap_in_place(i, j);
                v
            }
        }
    }
}

struct Search<'c, 't> {
    cfg: &'c SearchConfig,
    rng: ChaCha8Rng,
    state: SearchState,
    scorer: Scorer,
    base_swaps: Vec<(usize, usize)>,
    best_swaps: Vec<(usize, usize)>,
    var_best: Option<u64>,
    var_stall: usize,
    exhaust_streak: usize,
    trace: &'t mut dyn FnMut(SearchEvent<'_>),
}

impl Search<'_, '_> {
    fn apply(&mut self, q: &Permutation) -> Result<()> {
        self.state.best_a = self.state.best_a.permute_symmetric(q)?;
        self.state.cumulative_p = self.state.cumulative_p.then(q);
        Ok(())
    }

    fn regroup(&mut self) -> Result<()> {
        let (_, q) = kron_grouping(&self.state.best_a, self.cfg.dim_b, self.cfg.dim_c)?;
        self.apply(&q)
    }

    /// Random partial reshuffle followed by regrouping.
    fn perturb(&mut self, fraction: f64) -> Result<()> {
        let q = partial_shuffle(self.state.best_a.n(), fraction, &mut self.rng);
        self.apply(&q)?;
        self.regroup()?;
        (self.trace)(SearchEvent::Perturbed { fraction });
        Ok(())
    }

    fn is_exact(&mut self) -> bool {
        self.scorer
            .vecs
            .load(&self.state.best_a, self.cfg.dim_c, self.cfg.dim_b);
        self.scorer.vecs.all_nonzero_equal()
    }

    fn refresh_swaps(&mut self) -> Result<()> {
        match outsiders(&self.state.best_a, self.cfg.dim_b, self.cfg.dim_c)? {
            Outsiders::BlockMatrix => {
                self.state.block_matrix = true;
                self.best_swaps.clear();
            }
            Outsiders::Swaps(list) => self.best_swaps = list,
        }
        Ok(())
    }

    fn after_var_accept(&mut self, value: u64) -> Result<()> {
        match self.var_best {
            Some(best) if value <= best => self.var_stall += 1,
            _ => {
                self.var_best = Some(value);
                self.var_stall = 0;
            }
        }
        let grid = BlockGrid::new(&self.state.best_a, self.cfg.dim_b, self.cfg.dim_c)?;
        if grid.is_block_matrix() || self.var_stall >= self.cfg.metric_switch_stall {
            self.state.metric = MetricKind::Frob;
        }
        Ok(())
    }

    /// One pass over `best_swaps ++ base_swaps`; accepts the first strict
    /// improvement of the active metric.
    fn scan(&mut self) -> Result<bool> {
        let mut current = self.scorer.value(&self.state.best_a, self.state.metric);
        let n_best = self.best_swaps.len();
        let total = n_best + self.base_swaps.len();
        for idx in 0..total {
            if idx == n_best {
                self.base_swaps.shuffle(&mut self.rng);
                match self.state.metric {
                    // nothing was proposed, so nothing was exhausted
                    MetricKind::Frob if n_best == 0 => {}
                    MetricKind::Frob => {
                        self.exhaust_streak += 1;
                        if self.exhaust_streak >= self.cfg.exhaustion_stall {
                            self.exhaust_streak = 0;
                            self.perturb(self.cfg.outsiders_stall_perm_fraction)?;
                            self.state.block_matrix = false;
                            self.state.cornerized_matrix = false;
                            current = self.scorer.value(&self.state.best_a, MetricKind::Frob);
                        }
                    }
                    MetricKind::Var => {
                        self.state.metric = MetricKind::Frob;
                        current = self.scorer.value(&self.state.best_a, MetricKind::Frob);
                    }
                }
            }
            let (i, j) = if idx < n_best {
                self.best_swaps[idx]
            } else {
                self.base_swaps[idx - n_best]
            };
            let metric = self.state.metric;
            let v = self
                .scorer
                .swapped_value(&mut self.state.best_a, i, j, metric);
            if v > current {
                self.state.best_a.swap_in_place(i, j);
                self.state.cumulative_p.swap(i, j);
                self.state.block_matrix = false;
                if idx < n_best {
                    self.exhaust_streak = 0;
                }
                (self.trace)(SearchEvent::Accepted {
                    metric,
                    before: current,
                    after: v,
                });
                if metric == MetricKind::Var {
                    self.after_var_accept(v)?;
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn run(&mut self) -> Result<bool> {
        if self.is_exact() {
            return Ok(true);
        }
        self.regroup()?;
        let cfg = self.cfg;
        let restart_cap = cfg.max_restarts * cfg.perturbate_every;
        while self.state.iter < cfg.max_iter {
            self.state.iter += 1;
            if !self.state.block_matrix {
                self.refresh_swaps()?;
            }

            // an unbalanced block matrix is only a dead end once the climb
            // stalls on it; the perturbation is deferred until then
            let mut unbalanced = false;
            if !self.state.cornerized_matrix && self.state.block_matrix {
                let grid = BlockGrid::new(&self.state.best_a, cfg.dim_b, cfg.dim_c)?;
                unbalanced = !grid.balanced_blocks();
            }

            if !self.state.cornerized_matrix && self.state.block_matrix && !unbalanced {
                let out = onion_search(&self.state.best_a, cfg, &mut self.rng)?;
                self.apply(&out.perm)?;
                self.state.cornerized_matrix = true;
                (self.trace)(SearchEvent::OnionSearch {
                    success: out.success,
                });
                (self.trace)(SearchEvent::Iteration(&self.state));
                if out.success && self.is_exact() {
                    return Ok(true);
                }
                continue;
            }

            let improved = self.scan()?;
            (self.trace)(SearchEvent::Iteration(&self.state));
            if self.is_exact() {
                return Ok(true);
            }

            if !improved && unbalanced {
                self.state.n_restarts += 1;
                self.perturb(cfg.blockfail_perm_fraction)?;
                self.state.block_matrix = false;
            } else if !improved {
                self.state.n_restarts += 1;
                if self.state.n_restarts % cfg.perturbate_every == 0 {
                    self.perturb(1.0)?;
                    self.state.block_matrix = false;
                    self.state.cornerized_matrix = false;
                    self.state.metric = MetricKind::Var;
                    self.var_best = None;
                    self.var_stall = 0;
                } else {
                    self.state.metric = self.state.metric.other();
                }
            }
            if self.state.n_restarts > restart_cap {
                break;
            }
        }
        Ok(false)
    }
}

/// Searches for a symmetric permutation `P` with `Pᵀ A P = B ⊗ C`, `B` of side
/// `cfg.dim_b` and `C` of side `cfg.dim_c`.
pub fn alternate_local_search(a: &BinaryMatrix, cfg: &SearchConfig) -> Result<RunReport> {
    alternate_local_search_traced(a, cfg, &mut |_| {})
}

/// [`alternate_local_search`] reporting every [`SearchEvent`] to `trace`.
pub fn alternate_local_search_traced(
    a: &BinaryMatrix,
    cfg: &SearchConfig,
    trace: &mut dyn FnMut(SearchEvent<'_>),
) -> Result<RunReport> {
    cfg.validate()?;
    check_dims(a, cfg.dim_b, cfg.dim_c)?;
    let start = Instant::now();
    let n = a.n();
    let mut search = Search {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
        state: SearchState {
            best_a: a.clone(),
            cumulative_p: Permutation::identity(n),
            metric: MetricKind::Var,
            iter: 0,
            n_restarts: 0,
            block_matrix: false,
            cornerized_matrix: false,
        },
        scorer: Scorer::new(cfg.dim_b, cfg.dim_c),
        base_swaps: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        best_swaps: Vec::new(),
        var_best: None,
        var_stall: 0,
        exhaust_streak: 0,
        trace,
    };
    let solved = search.run()?;

    let state = search.state;
    let factors = crate::metrics::nearest_binary_kronecker(&state.best_a, cfg.dim_b, cfg.dim_c)?;
    let success = solved && factors.residual == 0;
    let report = RunReport {
        success,
        p: state.cumulative_p,
        b: factors.b,
        c: factors.c,
        residual: factors.residual,
        iterations: state.iter,
        restarts: state.n_restarts,
        wall_time: start.elapsed().as_secs_f64(),
    };
    debug_assert!(!report.success || report.verify(a));
    Ok(report)
}
