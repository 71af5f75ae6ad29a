//! Pointwise spectral CDF estimates from a moment table ("fixed-q").
//!
//! For each grid value `q` the eigenvalues are pushed through
//! `x = q / (q + λ) ∈ [q / (q + 2 d_max), 1]`, whose first `l` moments are the
//! table entries. A maximum-entropy density is fitted to them and
//! `c(q) = μ([0, q]) = 1 − ν_q([a, ½])` is read off where the map is steepest.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::maxent::{self, ConfidenceEllipsoid, MomentVector};
use crate::moments::MomentTable;
use crate::oracle::{exact_cdf, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    /// Maximum-entropy fit of the moments as given.
    Fitted,
    /// Fitted after shrinking inadmissible moments.
    Denoised,
    /// Only a lower-order fit succeeded.
    Reduced,
    /// No fit succeeded; two-point closed form from the first moment.
    Fallback,
    /// `a >= 1/2`: the interval `[a, 1/2]` is empty.
    Boundary,
    /// Produced by a baseline estimator.
    Baseline,
    /// Exact value from a spectrum.
    Exact,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Fitted => "fitted",
            PointStatus::Denoised => "denoised",
            PointStatus::Reduced => "reduced",
            PointStatus::Fallback => "fallback",
            PointStatus::Boundary => "boundary",
            PointStatus::Baseline => "baseline",
            PointStatus::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    /// Threshold (`q` for the forest method, `τ` for baselines).
    pub x: f64,
    pub c: f64,
    pub status: PointStatus,
    /// Moment order actually used by the maxent fit (0 when none).
    #[serde(default)]
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCdfEstimate {
    pub method: String,
    pub points: Vec<CdfPoint>,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl SpectralCdfEstimate {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.c).collect()
    }

    /// Columns `x,c,status`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,c,status\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{}", p.x, p.c, p.status.as_str());
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Pool-adjacent-violators projection onto nondecreasing sequences.
    pub fn make_monotone(&mut self) {
        let values = isotonic(&self.values());
        for (p, v) in self.points.iter_mut().zip(values) {
            p.c = v;
        }
    }
}

/// Least-squares nondecreasing fit (unit weights).
pub fn isotonic(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Stop the Newton iterations once the model moments enter the
    /// confidence ellipsoid built from the table's variance bounds.
    pub use_ellipsoid: bool,
    /// Apply isotonic regression across `q` afterwards.
    pub monotone: bool,
    pub nodes: usize,
    pub exec: Exec,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { use_ellipsoid: true, monotone: false, nodes: maxent::DEFAULT_NODES, exec: Exec::default() }
    }
}

/// Lower end of the support of `ν_q`.
pub fn support_lower_bound(q: f64, max_degree: f64) -> f64 {
    q / (q + 2.0 * max_degree)
}

/// One grid point: `(c, status, order)`.
pub fn reconstruct_point(
    q: f64,
    moments: &[f64],
    var_bound: Option<&[f64]>,
    max_degree: f64,
    opts: &ReconstructOptions,
) -> (f64, PointStatus, usize) {
    let a = support_lower_bound(q, max_degree);
    let b = 1.0;
    if a >= 0.5 - 1e-12 || moments.is_empty() {
        return (1.0, PointStatus::Boundary, 0);
    }
    let l = moments.len();
    for order in (1..=l).rev() {
        let mv = MomentVector::new(moments[..order].to_vec(), a, b);
        let (clean, shrink) = maxent::shrink_to_admissible(&mv);
        let ellipsoid = match (opts.use_ellipsoid, var_bound) {
            (true, Some(v)) => ConfidenceEllipsoid::new(moments[..order].to_vec(), v[..order].to_vec()),
            _ => None,
        };
        let Ok(model) = maxent::fit_maxent_with_nodes(&clean, ellipsoid.as_ref(), opts.nodes) else {
            continue;
        };
        let Ok(mass) = model.interval_mass(a, 0.5) else {
            continue;
        };
        let status = if order < l {
            PointStatus::Reduced
        } else if shrink > 0.0 {
            PointStatus::Denoised
        } else {
            PointStatus::Fitted
        };
        return ((1.0 - mass).clamp(0.0, 1.0), status, order);
    }
    // two-point law on {a, b} with mean m_1
    let m1 = moments[0].clamp(a, b);
    let mass_at_a = (b - m1) / (b - a);
    ((1.0 - mass_at_a).clamp(0.0, 1.0), PointStatus::Fallback, 0)
}

pub fn reconstruct_cdf(table: &MomentTable, max_degree: f64, opts: &ReconstructOptions) -> SpectralCdfEstimate {
    let points = exec::map_indexed(opts.exec, table.q_values.len(), |iq| {
        let q = table.q_values[iq];
        let var = (!table.is_exact()).then(|| table.var_bound[iq].as_slice());
        let (c, status, order) = reconstruct_point(q, &table.h_hat[iq], var, max_degree, opts);
        CdfPoint { x: q, c, status, order }
    });
    let mut est = SpectralCdfEstimate {
        method: if table.is_exact() { "exact-moments".into() } else { "forests".into() },
        points,
        config: serde_json::json!({
            "l": table.order(),
            "n_lambda": table.q_values.len(),
            "replicates": table.replicates,
            "max_degree": max_degree,
            "use_ellipsoid": opts.use_ellipsoid,
            "monotone": opts.monotone,
            "nodes": opts.nodes,
        }),
    };
    if opts.monotone {
        est.make_monotone();
    }
    est
}

/// Mean absolute deviation from the exact CDF over the estimate's points.
pub fn cdf_error(est: &SpectralCdfEstimate, spec: &Spectrum) -> Result<f64> {
    if est.points.is_empty() {
        return Err(Error::EmptyEstimate);
    }
    let total: f64 = est.points.iter().map(|p| (p.c - exact_cdf(spec, p.x)).abs()).sum();
    Ok(total / est.points.len() as f64)
}

pub fn cdf_max_error(est: &SpectralCdfEstimate, spec: &Spectrum) -> Result<f64> {
    if est.points.is_empty() {
        return Err(Error::EmptyEstimate);
    }
    Ok(est.points.iter().map(|p| (p.c - exact_cdf(spec, p.x)).abs()).fold(0.0, f64::max))
}

/// The exact CDF sampled at `xs`.
pub fn exact_estimate(spec: &Spectrum, xs: &[f64]) -> SpectralCdfEstimate {
    SpectralCdfEstimate {
        method: "exact".into(),
        points: xs
            .iter()
            .map(|&x| CdfPoint { x, c: exact_cdf(spec, x), status: PointStatus::Exact, order: 0 })
            .collect(),
        config: serde_json::Value::Null,
    }
}
