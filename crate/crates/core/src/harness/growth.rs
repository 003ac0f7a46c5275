use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::SearchConfig;

use super::batch::run_batch;
use super::instance::InstanceSpec;

/// One point of a running-time versus edge-count curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub dim_c: usize,
    pub edges: f64,
    pub t_avg: Option<f64>,
    pub t_avg_prime: Option<f64>,
    pub failure_pct: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthParams {
    pub rho_a: f64,
    pub dim_b: usize,
    pub dim_c_values: Vec<usize>,
    pub instances: usize,
    pub variations: usize,
    pub seed: u64,
}

impl GrowthParams {
    pub fn new(rho_a: f64, dim_b: usize, dim_c_values: Vec<usize>) -> Self {
        GrowthParams {
            rho_a,
            dim_b,
            dim_c_values,
            instances: 6,
            variations: 10,
            seed: 0,
        }
    }
}

/// Runs one batch per `dim_c` with both factor densities set to `sqrt(rho_a)`.
/// Rows are sorted by mean edge count.
pub fn growth_study(params: &GrowthParams, cfg: &SearchConfig) -> Result<Vec<GrowthRow>> {
    if !(params.rho_a > 0.0 && params.rho_a < 1.0) {
        return Err(Error::InvalidConfig(format!("rho_a = {} is outside (0, 1)", params.rho_a)));
    }
    let rho = params.rho_a.sqrt();
    let mut rows = params
        .dim_c_values
        .iter()
        .map(|&dim_c| {
            let spec = InstanceSpec::new(params.dim_b, dim_c, rho, rho, params.seed ^ dim_c as u64);
            let batch = run_batch(&spec, params.instances, params.variations, cfg)?;
            Ok(GrowthRow {
                dim_c,
                edges: batch.mean_edges,
                t_avg: batch.stats.t_avg,
                t_avg_prime: batch.stats.t_avg_prime,
                failure_pct: batch.stats.failure_pct,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|x, y| x.edges.total_cmp(&y.edges));
    Ok(rows)
}

/// Least-squares slope of `t_avg` against `edges`, over rows with a defined time.
pub fn time_slope(rows: &[GrowthRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_avg.map(|t| (r.edges, t)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
