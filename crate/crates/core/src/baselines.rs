//! Matrix-vector baselines for the spectral CDF: Jackson-damped Chebyshev
//! expansion of the step function with Hutchinson trace estimates (`poly`),
//! and stochastic Lanczos quadrature (`slq`).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::Graph;
use crate::reconstruct::{CdfPoint, PointStatus, SpectralCdfEstimate};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Chebyshev degree or number of Lanczos steps.
    pub p: usize,
    /// Number of probe vectors.
    pub r: usize,
    pub tau_grid: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub exec: Exec,
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.r == 0 {
            return Err(Error::Config(format!("p and r must be at least 1 (p = {}, r = {})", self.p, self.r)));
        }
        if self.tau_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("tau grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

pub fn rademacher<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn probe(seed: u64, index: usize, n: usize) -> Vec<f64> {
    rademacher(n, &mut rng::stream(seed, &[0x5052_4f42, index as u64]))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jackson damping factors `g_0..g_p` for a degree-`p` expansion, i.e. the
/// kernel for `N = p + 1` moments:
/// `g_j = [(N − j + 1) cos(πj/(N+1)) + sin(πj/(N+1)) cot(π/(N+1))] / (N + 1)`.
pub fn jackson_coefficients(p: usize) -> Vec<f64> {
    let n1 = (p + 2) as f64;
    let a = PI / n1;
    let cot = a.cos() / a.sin();
    (0..=p)
        .map(|j| {
            let jf = j as f64;
            ((n1 - jf) * (a * jf).cos() + (a * jf).sin() * cot) / n1
        })
        .collect()
}

/// `zᵀ T_j(L̃) z` for `j = 0..=p` with `L̃ = (2L − bI) / b`, by the
/// three-term recurrence (one Laplacian product per order).
pub fn chebyshev_moments(g: &Graph, z: &[f64], p: usize, b: f64) -> Result<Vec<f64>> {
    let n = g.n();
    let mut out = Vec::with_capacity(p + 1);
    let mut prev = z.to_vec();
    out.push(dot(z, &prev));
    if p == 0 {
        return Ok(out);
    }
    let mut lz = vec![0.0; n];
    g.laplacian_matvec_into(&prev, &mut lz)?;
    let mut cur: Vec<f64> = lz.iter().zip(&prev).map(|(l, x)| (2.0 * l - b * x) / b).collect();
    out.push(dot(z, &cur));
    for _ in 2..=p {
        g.laplacian_matvec_into(&cur, &mut lz)?;
        let next: Vec<f64> = lz
            .iter()
            .zip(&cur)
            .zip(&prev)
            .map(|((l, c), pr)| 2.0 * (2.0 * l - b * c) / b - pr)
            .collect();
        out.push(dot(z, &next));
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// `∫_{-1}^{t} ρ_p(x) dx` for the Jackson-damped Chebyshev density with
/// normalised moments `mu` (`mu[0] = 1` for a probability measure).
pub fn chebyshev_cdf(mu: &[f64], damping: &[f64], t: f64) -> f64 {
    let theta = t.clamp(-1.0, 1.0).acos();
    let mut acc = damping[0] * mu[0] * (PI - theta);
    for j in 1..mu.len() {
        acc -= 2.0 * damping[j] * mu[j] * (j as f64 * theta).sin() / j as f64;
    }
    acc / PI
}

fn trivial_spectrum_estimate(method: &str, cfg: &BaselineConfig) -> SpectralCdfEstimate {
    SpectralCdfEstimate {
        method: method.into(),
        points: cfg
            .tau_grid
            .iter()
            .map(|&x| CdfPoint { x, c: if x >= 0.0 { 1.0 } else { 0.0 }, status: PointStatus::Baseline, order: 0 })
            .collect(),
        config: serde_json::to_value(cfg).unwrap_or_default(),
    }
}

/// Jackson-Chebyshev (`poly`) estimate of the spectral CDF on `cfg.tau_grid`.
pub fn kpm_cdf(g: &Graph, cfg: &BaselineConfig) -> Result<SpectralCdfEstimate> {
    cfg.validate()?;
    let n = g.n();
    let b = g.gershgorin_bound();
    if b == 0.0 || n == 0 {
        return Ok(trivial_spectrum_estimate("poly", cfg));
    }
    let per_probe = exec::try_map_indexed(cfg.exec, cfg.r, |i| chebyshev_moments(g, &probe(cfg.seed, i, n), cfg.p, b))?;
    let mut mu = vec![0.0; cfg.p + 1];
    for m in &per_probe {
        for (a, x) in mu.iter_mut().zip(m) {
            *a += x;
        }
    }
    let norm = (cfg.r * n) as f64;
    for a in mu.iter_mut() {
        *a /= norm;
    }
    let damping = jackson_coefficients(cfg.p);
    let points = cfg
        .tau_grid
        .iter()
        .map(|&tau| {
            let c = chebyshev_cdf(&mu, &damping, (2.0 * tau - b) / b);
            CdfPoint { x: tau, c: c.clamp(0.0, 1.0), status: PointStatus::Baseline, order: cfg.p }
        })
        .collect();
    Ok(SpectralCdfEstimate { method: "poly".into(), points, config: serde_json::to_value(cfg)? })
}

/// Ritz values and weights of one Lanczos run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Diagonal of the tridiagonal matrix.
    pub alpha: Vec<f64>,
    /// Off-diagonal of the tridiagonal matrix.
    pub beta: Vec<f64>,
}

/// `steps` Lanczos iterations on `L` from `start` (normalised internally)
/// with full reorthogonalisation. Stops early on an invariant subspace.
pub fn lanczos(g: &Graph, start: &[f64], steps: usize) -> Result<GaussRule> {
    let n = g.n();
    let norm0 = dot(start, start).sqrt();
    if norm0 == 0.0 || steps == 0 {
        return Err(Error::Config("Lanczos needs a nonzero start vector and at least one step".into()));
    }
    let scale = g.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / norm0).collect()];
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];
    for j in 0..steps {
        g.laplacian_matvec_into(&basis[j], &mut w)?;
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        if j + 1 == steps {
            break;
        }
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * vi;
        }
        if j > 0 {
            let bprev = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= bprev * vi;
            }
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let bnext = dot(&w, &w).sqrt();
        if bnext <= 1e-10 * scale {
            break;
        }
        beta.push(bnext);
        basis.push(w.iter().map(|x| x / bnext).collect());
    }
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..k).map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    beta.truncate(k.saturating_sub(1));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        alpha,
        beta,
    })
}

/// Stochastic Lanczos quadrature (`slq`) estimate on `cfg.tau_grid`.
pub fn slq_cdf(g: &Graph, cfg: &BaselineConfig) -> Result<SpectralCdfEstimate> {
    cfg.validate()?;
    let n = g.n();
    if cfg.p > n {
        return Err(Error::Config(format!("Lanczos order p = {} exceeds n = {}", cfg.p, n)));
    }
    if g.gershgorin_bound() == 0.0 {
        return Ok(trivial_spectrum_estimate("slq", cfg));
    }
    let rules = exec::try_map_indexed(cfg.exec, cfg.r, |i| lanczos(g, &probe(cfg.seed, i, n), cfg.p))?;
    let points = cfg
        .tau_grid
        .iter()
        .map(|&tau| {
            let mut c = 0.0;
            for rule in &rules {
                c += rule.nodes.iter().zip(&rule.weights).filter(|(t, _)| **t <= tau).map(|(_, w)| w).sum::<f64>();
            }
            c /= cfg.r as f64;
            CdfPoint { x: tau, c: c.clamp(0.0, 1.0), status: PointStatus::Baseline, order: cfg.p }
        })
        .collect();
    Ok(SpectralCdfEstimate { method: "slq".into(), points, config: serde_json::to_value(cfg)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{barabasi_albert, grid2d, Edge};
    use crate::oracle::exact_spectrum;

    fn cfg(p: usize, r: usize, tau: Vec<f64>) -> BaselineConfig {
        BaselineConfig { p, r, tau_grid: tau, seed: 3, exec: Exec::Parallel }
    }

    #[test]
    fn jackson_endpoints() {
        let g = jackson_coefficients(10);
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(g[10] > 0.0 && g[10] < 0.05);
        // p = 1: g_1 = [2 cos(π/3) + sin(π/3) cot(π/3)] / 3 = 1/2
        let g1 = jackson_coefficients(1);
        assert_eq!(g1.len(), 2);
        assert!((g1[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_recurrence_matches_dense_polynomials() {
        let g = barabasi_albert(30, 3, 5).unwrap();
        let n = g.n();
        let b = g.gershgorin_bound();
        let l = DMatrix::from_row_slice(n, n, &g.dense_laplacian());
        let lt = (l * 2.0 - DMatrix::identity(n, n) * b) / b;
        let z = probe(1, 0, n);
        let zv = nalgebra::DVector::from_column_slice(&z);
        let got = chebyshev_moments(&g, &z, 12, b).unwrap();
        let mut t0 = DMatrix::<f64>::identity(n, n);
        let mut t1 = lt.clone();
        for (j, &m) in got.iter().enumerate() {
            let tj = match j {
                0 => t0.clone(),
                1 => t1.clone(),
                _ => {
                    let t2 = &lt * &t1 * 2.0 - &t0;
                    t0 = t1;
                    t1 = t2;
                    t1.clone()
                }
            };
            let dense = (zv.transpose() * &tj * &zv)[(0, 0)];
            assert!((dense - m).abs() <= 1e-8 * (1.0 + dense.abs()), "order {j}");
        }
    }

    #[test]
    fn kpm_is_one_above_the_bound() {
        let g = grid2d(6, 6).unwrap();
        let b = g.gershgorin_bound();
        let e = kpm_cdf(&g, &cfg(20, 3, vec![b, b + 1.0])).unwrap();
        assert!(e.values().iter().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lanczos_first_coefficient_is_rayleigh_quotient() {
        let g = barabasi_albert(80, 3, 2).unwrap();
        let z = probe(7, 0, 80);
        let rule = lanczos(&g, &z, 10).unwrap();
        let lz = g.laplacian_matvec(&z).unwrap();
        let rq = dot(&z, &lz) / dot(&z, &z);
        assert!((rule.alpha[0] - rq).abs() < 1e-10);
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_order_lanczos_recovers_the_spectrum() {
        let g = Graph::from_edges(
            &[Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.5), Edge::new(2, 3, 0.7), Edge::new(3, 4, 1.9), Edge::new(0, 4, 0.3)],
            5,
        )
        .unwrap();
        let spec = exact_spectrum(&g).unwrap();
        let z = vec![0.3, -1.1, 0.8, 0.5, -0.2];
        let rule = lanczos(&g, &z, 5).unwrap();
        assert_eq!(rule.nodes.len(), 5);
        for (a, b) in rule.nodes.iter().zip(spec.eigenvalues()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn lanczos_breakdown_truncates() {
        // the all-ones start vector spans a one-dimensional invariant subspace
        let g = grid2d(3, 3).unwrap();
        let rule = lanczos(&g, &[1.0; 9], 5).unwrap();
        assert_eq!(rule.nodes.len(), 1);
        assert!(rule.nodes[0].abs() < 1e-12);
    }

    #[test]
    fn ritz_values_inside_gershgorin_interval() {
        let g = barabasi_albert(200, 4, 1).unwrap();
        let b = g.gershgorin_bound();
        for i in 0..3 {
            let rule = lanczos(&g, &probe(2, i, 200), 30).unwrap();
            assert!(rule.nodes.iter().all(|&t| t >= -1e-9 && t <= b + 1e-9));
        }
    }

    #[test]
    fn slq_rejects_too_many_steps_and_is_monotone() {
        let g = grid2d(4, 4).unwrap();
        assert!(slq_cdf(&g, &cfg(17, 1, vec![1.0])).is_err());
        let tau: Vec<f64> = (0..20).map(|i| i as f64 * 0.4).collect();
        let e = slq_cdf(&g, &cfg(10, 4, tau)).unwrap();
        assert!(e.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn edgeless_graph() {
        let g = Graph::from_edges(&[], 4).unwrap();
        for e in [kpm_cdf(&g, &cfg(5, 2, vec![-1.0, 0.0, 1.0])).unwrap(), slq_cdf(&g, &cfg(2, 2, vec![-1.0, 0.0, 1.0])).unwrap()] {
            assert_eq!(e.values(), vec![0.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn deterministic_across_exec_modes() {
        let g = barabasi_albert(300, 5, 4).unwrap();
        let tau = vec![1.0, 5.0, 10.0, 20.0];
        let mut c = cfg(15, 6, tau);
        let a = kpm_cdf(&g, &c).unwrap();
        let s1 = slq_cdf(&g, &c).unwrap();
        c.exec = Exec::Sequential;
        assert_eq!(a.values(), kpm_cdf(&g, &c).unwrap().values());
        assert_eq!(s1.values(), slq_cdf(&g, &c).unwrap().values());
    }
}
