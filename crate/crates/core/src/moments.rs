//! Monte Carlo estimation of `h(q, k) = (1/n) Tr(K_q^k)` over a log-spaced
//! grid of `q` from fixed points of composed forest root maps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::forest::ForestSampler;
use crate::graph::Graph;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// `q_min = mean_degree / alpha`.
    pub alpha: f64,
    /// Number of grid points.
    pub n_lambda: usize,
    /// Highest moment order.
    pub l: usize,
    /// Monte Carlo replicates.
    pub s: usize,
    pub seed: u64,
    #[serde(default)]
    pub exec: Exec,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { alpha: 100.0, n_lambda: 15, l: 3, s: 20, seed: 0, exec: Exec::default() }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        for (name, v) in [("n_lambda", self.n_lambda), ("l", self.l), ("s", self.s)] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn q_grid(&self, g: &Graph) -> Result<Vec<f64>> {
        make_q_grid(g.mean_degree(), g.max_degree(), self.alpha, self.n_lambda)
    }
}

/// `n_lambda` log-spaced values from `mean_degree / alpha` to `2 max_degree`
/// inclusive. A single-point grid is `[q_min]`.
pub fn make_q_grid(mean_degree: f64, max_degree: f64, alpha: f64, n_lambda: usize) -> Result<Vec<f64>> {
    if !(mean_degree > 0.0 && max_degree > 0.0 && alpha > 0.0) || n_lambda == 0 {
        return Err(Error::Config(format!(
            "grid needs positive degrees, alpha and size (mean {mean_degree}, max {max_degree}, alpha {alpha}, n {n_lambda})"
        )));
    }
    let q_min = mean_degree / alpha;
    let q_max = 2.0 * max_degree;
    if !(q_min < q_max) {
        return Err(Error::Config(format!("inverted q bounds: q_min = {q_min} >= q_max = {q_max}")));
    }
    if n_lambda == 1 {
        return Ok(vec![q_min]);
    }
    let ratio = (q_max / q_min).ln();
    let last = (n_lambda - 1) as f64;
    let mut grid: Vec<f64> = (0..n_lambda).map(|i| q_min * (ratio * i as f64 / last).exp()).collect();
    grid[0] = q_min;
    grid[n_lambda - 1] = q_max;
    Ok(grid)
}

/// Estimates (or exact values) of `h(q, k)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub q_values: Vec<f64>,
    /// `h_hat[iq][k - 1]`.
    pub h_hat: Vec<Vec<f64>>,
    /// Plug-in variance bound `h_hat / (n s)` of each averaged entry.
    pub var_bound: Vec<Vec<f64>>,
    /// Replicates averaged; zero for an exact table.
    pub replicates: usize,
    /// Graph order.
    pub n: usize,
}

impl MomentTable {
    pub fn order(&self) -> usize {
        self.h_hat.first().map_or(0, Vec::len)
    }

    pub fn is_exact(&self) -> bool {
        self.replicates == 0
    }

    /// Columns `q,k,h_hat,var_bound`, one row per grid point and order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,k,h_hat,var_bound\n");
        for (iq, q) in self.q_values.iter().enumerate() {
            for k in 0..self.order() {
                let _ = writeln!(s, "{},{},{},{}", q, k + 1, self.h_hat[iq][k], self.var_bound[iq][k]);
            }
        }
        s
    }

    pub fn to_json(&self, config: Option<&EstimatorConfig>) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            config: Option<&'a EstimatorConfig>,
            table: &'a MomentTable,
        }
        Ok(serde_json::to_string_pretty(&Doc { config, table: self })?)
    }
}

/// Single-replicate estimates `[replicate][iq][k - 1]`.
///
/// Each `(replicate, grid point)` pair draws `l` independent forests, each
/// from its own stream `(seed, replicate, iq, j)`; the `k`-th estimate is the
/// fixed-point fraction of the composition of the first `k` root maps.
pub fn sample_replicates(g: &Graph, q_values: &[f64], l: usize, s: usize, seed: u64, exec: Exec) -> Result<Vec<Vec<Vec<f64>>>> {
    if l == 0 || s == 0 {
        return Err(Error::Config("l and s must be at least 1".into()));
    }
    let nq = q_values.len();
    let n = g.n();
    let units = exec::try_map_indexed(exec, s * nq, |unit| -> Result<Vec<f64>> {
        let (rep, iq) = (unit / nq, unit % nq);
        let q = q_values[iq];
        let mut sampler = ForestSampler::new();
        let mut roots = Vec::with_capacity(n);
        let mut rho: Vec<usize> = Vec::with_capacity(n);
        let mut out = Vec::with_capacity(l);
        for j in 0..l {
            let mut r = rng::stream(seed, &[rep as u64, iq as u64, j as u64]);
            sampler.sample_root_map_into(g, q, &mut r, &mut roots)?;
            if j == 0 {
                rho.extend_from_slice(&roots);
            } else {
                for x in rho.iter_mut() {
                    *x = roots[*x];
                }
            }
            let fixed = rho.iter().enumerate().filter(|&(i, &x)| i == x).count();
            out.push(if n == 0 { 0.0 } else { fixed as f64 / n as f64 });
        }
        Ok(out)
    })?;
    let mut reps = Vec::with_capacity(s);
    let mut it = units.into_iter();
    for _ in 0..s {
        reps.push(it.by_ref().take(nq).collect());
    }
    Ok(reps)
}

/// Averages replicate estimates in ascending replicate order.
pub fn average_replicates(q_values: &[f64], reps: &[Vec<Vec<f64>>], n: usize) -> MomentTable {
    let s = reps.len();
    let l = reps.first().and_then(|r| r.first()).map_or(0, Vec::len);
    let mut h_hat = vec![vec![0.0; l]; q_values.len()];
    for rep in reps {
        for (acc, est) in h_hat.iter_mut().zip(rep) {
            for (a, e) in acc.iter_mut().zip(est) {
                *a += e;
            }
        }
    }
    for row in h_hat.iter_mut() {
        for h in row.iter_mut() {
            *h /= s as f64;
        }
    }
    let denom = (n * s) as f64;
    let var_bound = h_hat.iter().map(|row| row.iter().map(|h| h / denom).collect()).collect();
    MomentTable { q_values: q_values.to_vec(), h_hat, var_bound, replicates: s, n }
}

pub fn estimate_moment_table(g: &Graph, cfg: &EstimatorConfig) -> Result<MomentTable> {
    cfg.validate()?;
    let grid = cfg.q_grid(g)?;
    estimate_on_grid(g, &grid, cfg)
}

/// As [`estimate_moment_table`] on a caller-supplied grid.
pub fn estimate_on_grid(g: &Graph, q_values: &[f64], cfg: &EstimatorConfig) -> Result<MomentTable> {
    cfg.validate()?;
    let reps = sample_replicates(g, q_values, cfg.l, cfg.s, cfg.seed, cfg.exec)?;
    Ok(average_replicates(q_values, &reps, g.n()))
}

/// `h(q, k) = (1/n) Σ_i (q / (q + λ_i))^k` from known eigenvalues.
pub fn exact_moment_table(eigs: &[f64], q_values: &[f64], l: usize) -> Result<MomentTable> {
    if let Some(&bad) = eigs.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::NegativeEigenvalue(bad));
    }
    let n = eigs.len();
    let h_hat: Vec<Vec<f64>> = q_values
        .iter()
        .map(|&q| {
            let mut acc = vec![0.0; l];
            for &lam in eigs {
                let x = q / (q + lam);
                let mut p = 1.0;
                for a in acc.iter_mut() {
                    p *= x;
                    *a += p;
                }
            }
            acc.iter().map(|a| a / n.max(1) as f64).collect()
        })
        .collect();
    Ok(MomentTable {
        q_values: q_values.to_vec(),
        var_bound: vec![vec![0.0; l]; q_values.len()],
        h_hat,
        replicates: 0,
        n,
    })
}
