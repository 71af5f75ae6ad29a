//! Maximum-entropy densities on an interval from a few power moments.
//!
//! The fitted density is `q_β(x) = exp(βᵀv(x) − ψ(β))` with
//! `v(x) = (x, x², …, x^l)`; `β` minimises the convex dual
//! `F(β) = ψ(β) − βᵀm` by damped Newton, with `ψ` and its derivatives taken
//! from one Gauss-Legendre rule on `[a, b]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::MaxEntError;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_NODES: usize = 64;
pub const MAX_ITERATIONS: usize = 500;
pub const GRADIENT_TOL: f64 = 1e-9;
/// Smallest eigenvalue tolerated by [`check_admissible`].
pub const PSD_TOL: f64 = -1e-12;
/// Smallest eigenvalue required after [`denoise_moments`].
pub const DENOISE_MARGIN: f64 = 1e-10;
const MIN_STEP: f64 = 1.0 / (1u64 << 30) as f64;
const BISECTION_TOL: f64 = 1e-6;
/// Allowed normalisation error of a fitted density on a rule twice as fine.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// Raw moments `m_1..m_l` of a measure on `[a, b]` (`m_0 = 1` implied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub m: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl MomentVector {
    pub fn new(m: Vec<f64>, a: f64, b: f64) -> Self {
        MomentVector { m, a, b }
    }

    pub fn order(&self) -> usize {
        self.m.len()
    }

    /// `m_0 = 1, m_1, …, m_l`.
    fn with_mass(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.m.iter().copied()).collect()
    }

    pub fn truncated(&self, l: usize) -> MomentVector {
        MomentVector { m: self.m[..l.min(self.m.len())].to_vec(), a: self.a, b: self.b }
    }
}

/// Moments of the uniform law on `[a, b]`.
pub fn uniform_moments(a: f64, b: f64, l: usize) -> Vec<f64> {
    (1..=l)
        .map(|k| {
            let k1 = (k + 1) as i32;
            (b.powi(k1) - a.powi(k1)) / ((k + 1) as f64 * (b - a))
        })
        .collect()
}

/// The two localising Hankel matrices whose joint positive semidefiniteness
/// characterises moment sequences of measures on `[a, b]`.
fn hankel_pair(mv: &MomentVector) -> Vec<DMatrix<f64>> {
    let m = mv.with_mass();
    let (a, b) = (mv.a, mv.b);
    let l = mv.order();
    if l % 2 == 1 {
        let k = l / 2 + 1;
        let lower = DMatrix::from_fn(k, k, |i, j| m[i + j + 1] - a * m[i + j]);
        let upper = DMatrix::from_fn(k, k, |i, j| b * m[i + j] - m[i + j + 1]);
        vec![lower, upper]
    } else {
        let k = l / 2;
        let plain = DMatrix::from_fn(k + 1, k + 1, |i, j| m[i + j]);
        let mut out = vec![plain];
        if k > 0 {
            out.push(DMatrix::from_fn(k, k, |i, j| {
                (a + b) * m[i + j + 1] - a * b * m[i + j] - m[i + j + 2]
            }));
        }
        out
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    m.clone().symmetric_eigenvalues().min()
}

/// Smallest eigenvalue over the Hankel pair; `-inf` for non-finite input.
pub fn admissibility_margin(mv: &MomentVector) -> f64 {
    if mv.m.iter().any(|x| !x.is_finite()) || !(mv.a < mv.b) {
        return f64::NEG_INFINITY;
    }
    if mv.m.is_empty() {
        return f64::INFINITY;
    }
    hankel_pair(mv).iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
}

/// Whether `mv` is (up to [`PSD_TOL`]) the moment vector of a probability
/// measure on `[a, b]`.
pub fn check_admissible(mv: &MomentVector) -> bool {
    admissibility_margin(mv) >= PSD_TOL
}

/// Shrinks an inadmissible vector towards the uniform moments:
/// `m(t) = (1 − t) m + t u` with the smallest `t` (to [`BISECTION_TOL`])
/// whose Hankel pair has margin at least [`DENOISE_MARGIN`].
/// Returns the repaired vector and `t` (zero when `mv` was admissible).
pub fn shrink_to_admissible(mv: &MomentVector) -> (MomentVector, f64) {
    if check_admissible(mv) {
        return (mv.clone(), 0.0);
    }
    let u = uniform_moments(mv.a, mv.b, mv.order());
    let at = |t: f64| MomentVector {
        m: mv
            .m
            .iter()
            .zip(&u)
            .map(|(&x, &y)| if x.is_finite() { (1.0 - t) * x + t * y } else { y })
            .collect(),
        a: mv.a,
        b: mv.b,
    };
    let good = |t: f64| admissibility_margin(&at(t)) >= DENOISE_MARGIN;
    if !good(1.0) {
        return (at(1.0), 1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if good(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (at(hi), hi)
}

pub fn denoise_moments(mv: &MomentVector) -> MomentVector {
    shrink_to_admissible(mv).0
}

/// `{m' : Σ_i (m'_i − m_i)² / v_i ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceEllipsoid {
    pub center: Vec<f64>,
    pub var: Vec<f64>,
}

impl ConfidenceEllipsoid {
    /// `None` unless every variance bound is positive and finite.
    pub fn new(center: Vec<f64>, var: Vec<f64>) -> Option<Self> {
        if center.len() != var.len() || var.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return None;
        }
        Some(ConfidenceEllipsoid { center, var })
    }

    pub fn distance(&self, m: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(&self.var)
            .zip(m)
            .map(|((c, v), x)| (x - c).powi(2) / v)
            .sum()
    }

    pub fn contains(&self, m: &[f64]) -> bool {
        self.distance(m) <= 1.0
    }
}

/// `ψ(β)` with the model moments and covariance from the same rule.
#[derive(Debug, Clone)]
pub struct LogPartition {
    pub psi: f64,
    pub moments: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

/// Quadrature nodes on `[a, b]` with their monomial features precomputed.
#[derive(Debug, Clone)]
struct Features {
    log_w: Vec<f64>,
    v: Vec<Vec<f64>>,
}

impl Features {
    fn new(a: f64, b: f64, l: usize, nodes: usize) -> Self {
        let (x, w) = GaussLegendre::new(nodes).on_interval(a, b);
        let v = x
            .iter()
            .map(|&xj| {
                let mut p = 1.0;
                (0..l)
                    .map(|_| {
                        p *= xj;
                        p
                    })
                    .collect()
            })
            .collect();
        Features { log_w: w.iter().map(|w| w.ln()).collect(), v }
    }

    fn evaluate(&self, beta: &[f64]) -> Result<LogPartition, MaxEntError> {
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(MaxEntError::NonFinite);
        }
        let l = beta.len();
        let s: Vec<f64> = self
            .v
            .iter()
            .zip(&self.log_w)
            .map(|(vj, lw)| lw + vj.iter().zip(beta).map(|(x, b)| x * b).sum::<f64>())
            .collect();
        let shift = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = s.iter().map(|sj| (sj - shift).exp()).sum();
        let psi = shift + total.ln();
        if !psi.is_finite() {
            return Err(MaxEntError::NonFinite);
        }
        let p: Vec<f64> = s.iter().map(|sj| (sj - psi).exp()).collect();
        let mut mean = vec![0.0; l];
        for (pj, vj) in p.iter().zip(&self.v) {
            for (m, x) in mean.iter_mut().zip(vj) {
                *m += pj * x;
            }
        }
        let mut cov = DMatrix::zeros(l, l);
        for (pj, vj) in p.iter().zip(&self.v) {
            for r in 0..l {
                let dr = vj[r] - mean[r];
                for c in 0..=r {
                    cov[(r, c)] += pj * dr * (vj[c] - mean[c]);
                }
            }
        }
        for r in 0..l {
            for c in 0..r {
                cov[(c, r)] = cov[(r, c)];
            }
        }
        Ok(LogPartition { psi, moments: mean, covariance: cov })
    }
}

/// Evaluates `ψ(β) = log ∫_a^b exp(βᵀv(x)) dx` by `nodes`-point
/// Gauss-Legendre, in max-shifted form.
pub fn log_partition(beta: &[f64], a: f64, b: f64, nodes: usize) -> Result<LogPartition, MaxEntError> {
    if nodes < beta.len() + 1 {
        return Err(MaxEntError::TooFewNodes { needed: beta.len() + 1, got: nodes });
    }
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(MaxEntError::BadSupport { a, b });
    }
    Features::new(a, b, beta.len(), nodes).evaluate(beta)
}

/// A fitted exponential-family density on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntModel {
    pub beta: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub psi: f64,
    pub nodes: usize,
    /// Newton iterations used.
    pub iterations: usize,
    /// The fit stopped because the model moments entered the ellipsoid.
    pub in_ellipsoid: bool,
}

impl MaxEntModel {
    pub fn log_density(&self, x: f64) -> f64 {
        let mut p = 1.0;
        let mut s = -self.psi;
        for b in &self.beta {
            p *= x;
            s += b * p;
        }
        s
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            return 0.0;
        }
        self.log_density(x).exp()
    }

    /// Fails when the density does not integrate to one on a rule with
    /// twice the nodes, i.e. the fit has collapsed onto quadrature nodes.
    pub fn check_resolved(&self) -> Result<(), MaxEntError> {
        let mass = GaussLegendre::new(2 * self.nodes).integrate(self.a, self.b, |x| self.log_density(x).exp());
        if (mass - 1.0).abs() <= RESOLUTION_TOL {
            Ok(())
        } else {
            Err(MaxEntError::Unresolved { mass })
        }
    }

    pub fn moments(&self) -> Vec<f64> {
        log_partition(&self.beta, self.a, self.b, self.nodes)
            .map(|lp| lp.moments)
            .unwrap_or_default()
    }

    /// `∫_c^d q_β(x) dx` by Gauss-Legendre on `[c, d]` with the model's node count.
    pub fn interval_mass(&self, c: f64, d: f64) -> Result<f64, MaxEntError> {
        let eps = 1e-12 * (self.b - self.a).abs().max(1.0);
        if !(c <= d && c >= self.a - eps && d <= self.b + eps) {
            return Err(MaxEntError::BadInterval { c, d, a: self.a, b: self.b });
        }
        if c == d {
            return Ok(0.0);
        }
        let mass = GaussLegendre::new(self.nodes).integrate(c, d, |x| self.log_density(x).exp());
        Ok(mass.clamp(0.0, 1.0))
    }
}

pub fn interval_mass(model: &MaxEntModel, c: f64, d: f64) -> Result<f64, MaxEntError> {
    model.interval_mass(c, d)
}

fn newton_direction(cov: &DMatrix<f64>, grad: &[f64]) -> Option<DVector<f64>> {
    let rhs = -DVector::from_column_slice(grad);
    let scale = cov.diagonal().max().max(f64::MIN_POSITIVE);
    let mut ridge = 0.0;
    for _ in 0..12 {
        let mut h = cov.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += ridge;
        }
        if let Some(ch) = h.cholesky() {
            let d = ch.solve(&rhs);
            if d.iter().all(|x| x.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
    }
    None
}

/// Fits the maximum-entropy density matching `mv`.
///
/// Stops as soon as the iterate's moments lie in `ellipsoid` (checked from
/// `β = 0` on), otherwise at gradient norm [`GRADIENT_TOL`]. Fails with
/// [`MaxEntError::NotConverged`] after [`MAX_ITERATIONS`] steps or when the
/// line search stalls, which happens for vectors on the boundary of the
/// moment space.
pub fn fit_maxent(mv: &MomentVector, ellipsoid: Option<&ConfidenceEllipsoid>) -> Result<MaxEntModel, MaxEntError> {
    fit_maxent_with_nodes(mv, ellipsoid, DEFAULT_NODES)
}

pub fn fit_maxent_with_nodes(
    mv: &MomentVector,
    ellipsoid: Option<&ConfidenceEllipsoid>,
    nodes: usize,
) -> Result<MaxEntModel, MaxEntError> {
    let (a, b) = (mv.a, mv.b);
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(MaxEntError::BadSupport { a, b });
    }
    if !check_admissible(mv) {
        return Err(MaxEntError::NotAdmissible { a, b });
    }
    let l = mv.order();
    if nodes < l + 1 {
        return Err(MaxEntError::TooFewNodes { needed: l + 1, got: nodes });
    }
    let feats = Features::new(a, b, l, nodes);
    let objective = |lp: &LogPartition, beta: &[f64]| lp.psi - beta.iter().zip(&mv.m).map(|(x, y)| x * y).sum::<f64>();
    let grad_of = |lp: &LogPartition| -> Vec<f64> { lp.moments.iter().zip(&mv.m).map(|(x, y)| x - y).collect() };
    let norm = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut beta = vec![0.0; l];
    let mut lp = feats.evaluate(&beta)?;
    let mut f = objective(&lp, &beta);
    let mut grad = grad_of(&lp);
    for iter in 0..=MAX_ITERATIONS {
        let done_ellipsoid = ellipsoid.is_some_and(|e| e.contains(&lp.moments));
        if done_ellipsoid || norm(&grad) <= GRADIENT_TOL {
            let model = MaxEntModel { beta, a, b, psi: lp.psi, nodes, iterations: iter, in_ellipsoid: done_ellipsoid };
            return model.check_resolved().map(|()| model);
        }
        if iter == MAX_ITERATIONS {
            break;
        }
        let stalled = || MaxEntError::NotConverged { iterations: iter, grad_norm: norm(&grad) };
        let dir = newton_direction(&lp.covariance, &grad).ok_or_else(stalled)?;
        let mut step = 1.0;
        let accepted = loop {
            if step < MIN_STEP {
                break None;
            }
            let trial: Vec<f64> = beta.iter().zip(dir.iter()).map(|(b, d)| b + step * d).collect();
            if let Ok(tlp) = feats.evaluate(&trial) {
                let tf = objective(&tlp, &trial);
                let tg = grad_of(&tlp);
                // at the optimum, F differences sink below round-off; then
                // accept on gradient decrease
                let flat = (tf - f).abs() <= 1e-13 * (1.0 + f.abs());
                if tf < f || (flat && norm(&tg) < norm(&grad)) {
                    break Some((trial, tlp, tf, tg));
                }
            }
            step *= 0.5;
        };
        let Some((nb, nlp, nf, ng)) = accepted else {
            return Err(stalled());
        };
        beta = nb;
        lp = nlp;
        f = nf;
        grad = ng;
    }
    Err(MaxEntError::NotConverged { iterations: MAX_ITERATIONS, grad_norm: norm(&grad) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn mv(m: &[f64]) -> MomentVector {
        MomentVector::new(m.to_vec(), 0.0, 1.0)
    }

    #[test]
    fn admissibility_examples() {
        assert!(check_admissible(&mv(&[0.5, 1.0 / 3.0, 0.25])));
        assert!(!check_admissible(&mv(&[0.5, 0.2, 0.15])));
        let a = 0.3;
        let point = MomentVector::new(vec![a, a * a, a * a * a], a, 1.0);
        assert!(check_admissible(&point));
        assert!(check_admissible(&mv(&[0.4])));
        assert!(!check_admissible(&mv(&[1.2])));
        // l = 2 needs m2 >= m1^2 and m2 <= (a + b) m1 - ab
        assert!(check_admissible(&mv(&[0.5, 0.3])));
        assert!(!check_admissible(&mv(&[0.5, 0.2])));
        assert!(!check_admissible(&mv(&[0.5, 0.6])));
        assert!(!check_admissible(&mv(&[0.5, f64::NAN, 0.1])));
    }

    #[test]
    fn denoising_repairs_and_is_idempotent() {
        let bad = mv(&[0.5, 0.2, 0.15]);
        let (fixed, t) = shrink_to_admissible(&bad);
        assert!(t > 0.0 && t <= 1.0);
        assert!(check_admissible(&fixed));
        assert!(admissibility_margin(&fixed) >= DENOISE_MARGIN);
        // on the segment towards the uniform moments
        let u = uniform_moments(0.0, 1.0, 3);
        for i in 0..3 {
            assert!((fixed.m[i] - ((1.0 - t) * bad.m[i] + t * u[i])).abs() < 1e-15);
        }
        // t is minimal up to the bisection tolerance
        let earlier = t - 2e-6;
        let m_earlier: Vec<f64> = bad.m.iter().zip(&u).map(|(x, y)| (1.0 - earlier) * x + earlier * y).collect();
        assert!(admissibility_margin(&MomentVector::new(m_earlier, 0.0, 1.0)) < DENOISE_MARGIN);
        assert_eq!(denoise_moments(&fixed), fixed);
        let good = mv(&[0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(denoise_moments(&good), good);
    }

    #[test]
    fn uniform_endpoint_is_admissible() {
        for (a, b) in [(0.0, 1.0), (0.2, 1.0), (0.5, 1.0), (0.01, 0.02)] {
            for l in 1..=5 {
                assert!(admissibility_margin(&MomentVector::new(uniform_moments(a, b, l), a, b)) > 0.0);
            }
        }
    }

    #[test]
    fn log_partition_examples() {
        let lp = log_partition(&[0.0, 0.0, 0.0], 0.0, 1.0, 64).unwrap();
        assert!(lp.psi.abs() < 1e-14);
        for (got, want) in lp.moments.iter().zip([0.5, 1.0 / 3.0, 0.25]) {
            assert!((got - want).abs() < 1e-14);
        }
        let lp = log_partition(&[1.0, 0.0, 0.0], 0.0, 1.0, 64).unwrap();
        assert!((lp.psi - (E - 1.0).ln()).abs() < 1e-13);
        // ∫ x e^x = 1, so m1 = 1 / (e - 1)
        assert!((lp.moments[0] - 1.0 / (E - 1.0)).abs() < 1e-13);
        assert!(log_partition(&[f64::NAN], 0.0, 1.0, 64).is_err());
        assert!(log_partition(&[1.0, 2.0], 0.0, 1.0, 2).is_err());
        // large natural parameters do not overflow
        let lp = log_partition(&[800.0, 0.0, 0.0], 0.0, 1.0, 64).unwrap();
        assert!(lp.psi.is_finite() && lp.moments[0] > 0.99);
    }

    #[test]
    fn gradient_and_hessian_checks() {
        let beta = [1.3, -2.0, 0.7];
        let (a, b) = (0.2, 1.0);
        let lp = log_partition(&beta, a, b, 64).unwrap();
        let eps = 1e-5;
        for i in 0..3 {
            let mut up = beta;
            let mut dn = beta;
            up[i] += eps;
            dn[i] -= eps;
            let fd = (log_partition(&up, a, b, 64).unwrap().psi - log_partition(&dn, a, b, 64).unwrap().psi) / (2.0 * eps);
            assert!((fd - lp.moments[i]).abs() < 1e-5);
        }
        let ev = lp.covariance.clone().symmetric_eigenvalues();
        assert!(ev.iter().all(|&e| e >= -1e-10));
    }

    #[test]
    fn fit_examples() {
        let m = fit_maxent(&mv(&[0.5, 1.0 / 3.0, 0.25]), None).unwrap();
        assert!(m.beta.iter().all(|b| b.abs() <= 1e-6), "{:?}", m.beta);
        let m = fit_maxent(&mv(&[1.0 / (E - 1.0)]), None).unwrap();
        assert!((m.beta[0] - 1.0).abs() <= 1e-6);
        let a = 0.3;
        let point = MomentVector::new(vec![a, a * a, a * a * a], a, 1.0);
        assert!(matches!(
            fit_maxent(&point, None),
            Err(MaxEntError::NotConverged { .. } | MaxEntError::Unresolved { .. })
        ));
        assert!(matches!(fit_maxent(&mv(&[0.5, 0.2, 0.15]), None), Err(MaxEntError::NotAdmissible { .. })));
    }

    #[test]
    fn ellipsoid_stops_early() {
        let target = [0.62, 0.42, 0.3];
        let ell = ConfidenceEllipsoid::new(target.to_vec(), vec![1e-2; 3]).unwrap();
        let early = fit_maxent(&mv(&target), Some(&ell)).unwrap();
        let full = fit_maxent(&mv(&target), None).unwrap();
        assert!(early.in_ellipsoid);
        assert!(early.iterations < full.iterations);
        assert!(ell.contains(&early.moments()));
        // β = 0 already inside a wide ellipsoid: the uniform model is returned
        let wide = ConfidenceEllipsoid::new(target.to_vec(), vec![1.0; 3]).unwrap();
        let m = fit_maxent(&mv(&target), Some(&wide)).unwrap();
        assert_eq!((m.iterations, m.beta.clone()), (0, vec![0.0; 3]));
        assert!(ConfidenceEllipsoid::new(vec![0.1], vec![0.0]).is_none());
    }

    #[test]
    fn collapsed_fit_is_rejected() {
        // just inside the moment-space boundary, the iterate reaches the
        // ellipsoid only after collapsing onto a few quadrature nodes
        let a = 0.067_803_580_730_951_66;
        let noisy = MomentVector::new(vec![0.5732, 0.354, 0.22], a, 1.0);
        let (clean, t) = shrink_to_admissible(&noisy);
        assert!(t > 0.0);
        let ell = ConfidenceEllipsoid::new(noisy.m.clone(), vec![2.866e-5, 1.77e-5, 1.1e-5]).unwrap();
        assert!(fit_maxent(&clean, Some(&ell)).is_err());
        let m = fit_maxent(&mv(&[0.62, 0.42, 0.3]), None).unwrap();
        assert!(m.check_resolved().is_ok());
    }

    #[test]
    fn interval_mass_examples() {
        let m = fit_maxent(&mv(&[0.5, 1.0 / 3.0, 0.25]), None).unwrap();
        assert!((m.interval_mass(0.0, 1.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((m.interval_mass(0.0, 0.5).unwrap() - 0.5).abs() < 1e-8);
        let m = MaxEntModel { beta: vec![1.0, 0.0, 0.0], a: 0.0, b: 1.0, psi: (E - 1.0).ln(), nodes: 64, iterations: 0, in_ellipsoid: false };
        let want = (E.sqrt() - 1.0) / (E - 1.0);
        assert!((m.interval_mass(0.0, 0.5).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.37754).abs() < 1e-5);
        assert!(m.interval_mass(0.6, 0.5).is_err());
        assert!(m.interval_mass(-0.5, 0.5).is_err());
        assert_eq!(m.interval_mass(0.5, 0.5).unwrap(), 0.0);
    }

    /// KL(p || uniform on [0,1]) = ∫ p log p.
    fn kl_to_uniform<F: Fn(f64) -> f64>(p: F) -> f64 {
        GaussLegendre::new(200).integrate(0.0, 1.0, |x| {
            let v = p(x);
            if v > 0.0 {
                v * v.ln()
            } else {
                0.0
            }
        })
    }

    #[test]
    fn maximum_entropy_beats_other_matching_densities() {
        let fit = fit_maxent(&mv(&[0.5, 1.0 / 3.0, 0.25]), None).unwrap();
        let kl_fit = kl_to_uniform(|x| fit.density(x));
        // shifted Legendre polynomials of degree 4 and 5 are orthogonal to 1, x, x², x³
        let p4 = |x: f64| 70.0 * x.powi(4) - 140.0 * x.powi(3) + 90.0 * x * x - 20.0 * x + 1.0;
        let p5 = |x: f64| 252.0 * x.powi(5) - 630.0 * x.powi(4) + 560.0 * x.powi(3) - 210.0 * x * x + 30.0 * x - 1.0;
        let alt1 = |x: f64| 1.0 + 0.3 * p4(x);
        let alt2 = |x: f64| 1.0 + 0.2 * p5(x);
        for alt in [&alt1 as &dyn Fn(f64) -> f64, &alt2] {
            let g = GaussLegendre::new(64);
            for k in 1..=3 {
                let mk = g.integrate(0.0, 1.0, |x| x.powi(k) * alt(x));
                assert!((mk - 1.0 / (k as f64 + 1.0)).abs() < 1e-12);
            }
            assert!(kl_fit <= kl_to_uniform(alt));
        }
        assert!(kl_fit.abs() < 1e-10);
    }
}
