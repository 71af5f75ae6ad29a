//! Dense ground truth for small and medium graphs: spectra, exact CDFs and
//! forest moments, the marginal kernel, and brute-force enumeration of rooted
//! spanning forests.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const SPECTRUM_LIMIT: usize = 5000;
pub const KERNEL_LIMIT: usize = 2000;
pub const ENUMERATION_LIMIT: usize = 8;

/// Laplacian eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigs: Vec<f64>,
}

impl Spectrum {
    /// Wraps a list of nonnegative eigenvalues (sorted on construction).
    pub fn from_eigenvalues(mut eigs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = eigs.iter().find(|&&l| !(l >= 0.0)) {
            return Err(Error::NegativeEigenvalue(bad));
        }
        eigs.sort_by(f64::total_cmp);
        Ok(Spectrum { eigs })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigs
    }

    pub fn n(&self) -> usize {
        self.eigs.len()
    }

    pub fn max(&self) -> f64 {
        self.eigs.last().copied().unwrap_or(0.0)
    }
}

/// Eigenvalues of the dense Laplacian. Round-off below zero is clipped.
pub fn exact_spectrum(g: &Graph) -> Result<Spectrum> {
    let n = g.n();
    if n > SPECTRUM_LIMIT {
        return Err(Error::TooLarge { n, limit: SPECTRUM_LIMIT });
    }
    if n == 0 {
        return Ok(Spectrum { eigs: Vec::new() });
    }
    let m = DMatrix::from_row_slice(n, n, &g.dense_laplacian());
    let tol = 1e-9 * g.gershgorin_bound().max(1.0);
    let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    for l in eigs.iter_mut() {
        if *l < 0.0 {
            if *l < -tol {
                return Err(Error::NegativeEigenvalue(*l));
            }
            *l = 0.0;
        }
    }
    eigs.sort_by(f64::total_cmp);
    Ok(Spectrum { eigs })
}

/// Fraction of eigenvalues `<= tau`.
pub fn exact_cdf(spec: &Spectrum, tau: f64) -> f64 {
    if spec.eigs.is_empty() {
        return 0.0;
    }
    spec.eigs.partition_point(|&l| l <= tau) as f64 / spec.eigs.len() as f64
}

/// `(1/n) Σ_i (q / (q + λ_i))^k`.
pub fn exact_h(spec: &Spectrum, q: f64, k: u32) -> f64 {
    let n = spec.eigs.len().max(1) as f64;
    spec.eigs.iter().map(|&l| (q / (q + l)).powi(k as i32)).sum::<f64>() / n
}

/// `K_q = q (qI + L)^{-1}` as a dense matrix.
pub fn marginal_kernel(g: &Graph, q: f64) -> Result<DMatrix<f64>> {
    let n = g.n();
    if n > KERNEL_LIMIT {
        return Err(Error::TooLarge { n, limit: KERNEL_LIMIT });
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::BadRate(q));
    }
    let mut a = DMatrix::from_row_slice(n, n, &g.dense_laplacian());
    for i in 0..n {
        a[(i, i)] += q;
    }
    let chol = a.cholesky().expect("qI + L is positive definite for q > 0");
    Ok(chol.solve(&DMatrix::from_diagonal_element(n, n, q)))
}

/// Exact law of the random rooted forest on a small graph.
#[derive(Debug, Clone)]
pub struct ForestDistribution {
    /// `(parent vector, probability)`; `parent[r] == r` marks roots.
    pub entries: Vec<(Vec<usize>, f64)>,
    /// Sum of the unnormalised weights `q^{|R|} Π w_ij`.
    pub z: f64,
}

impl ForestDistribution {
    pub fn probability_of(&self, parents: &[usize]) -> f64 {
        self.entries
            .iter()
            .find(|(p, _)| p.as_slice() == parents)
            .map_or(0.0, |&(_, pr)| pr)
    }

    pub fn expected_roots(&self) -> f64 {
        self.entries
            .iter()
            .map(|(p, pr)| pr * p.iter().enumerate().filter(|&(i, &r)| i == r).count() as f64)
            .sum()
    }

    /// `E[M(φ)]` where `M[i][root(i)] = 1`.
    pub fn expected_root_matrix(&self) -> DMatrix<f64> {
        let n = self.entries.first().map_or(0, |(p, _)| p.len());
        let mut m = DMatrix::zeros(n, n);
        for (parents, pr) in &self.entries {
            for i in 0..n {
                m[(i, root_of(parents, i))] += pr;
            }
        }
        m
    }
}

pub fn root_of(parents: &[usize], mut i: usize) -> usize {
    while parents[i] != i {
        i = parents[i];
    }
    i
}

fn is_acyclic(parents: &[usize]) -> bool {
    let n = parents.len();
    (0..n).all(|start| {
        let mut u = start;
        for _ in 0..n {
            if parents[u] == u {
                return true;
            }
            u = parents[u];
        }
        false
    })
}

/// Enumerates every rooted spanning forest as a parent vector (each non-root
/// points along a graph edge towards its root) with weight `q^{|R|} Π w`.
pub fn enumerate_forests(g: &Graph, q: f64) -> Result<ForestDistribution> {
    let n = g.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::BadRate(q));
    }
    let choices: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| std::iter::once((i, q)).chain(g.neighbors(i)).collect())
        .collect();
    let mut entries = Vec::new();
    let mut parents = vec![0usize; n];
    let mut idx = vec![0usize; n];
    let mut z = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for i in 0..n {
            let (p, wi) = choices[i][idx[i]];
            parents[i] = p;
            w *= wi;
        }
        if is_acyclic(&parents) {
            z += w;
            entries.push((parents.clone(), w));
        }
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    for e in entries.iter_mut() {
        e.1 /= z;
    }
    Ok(ForestDistribution { entries, z })
}
