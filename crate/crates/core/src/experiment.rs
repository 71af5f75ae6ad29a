//! Timed estimation runs and benchmark sweeps over graph families.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{kpm_cdf, slq_cdf, BaselineConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::{self, Graph};
use crate::moments::{estimate_on_grid, exact_moment_table, make_q_grid, EstimatorConfig};
use crate::oracle::{exact_spectrum, Spectrum, SPECTRUM_LIMIT};
use crate::reconstruct::{cdf_error, cdf_max_error, exact_estimate, reconstruct_cdf, CdfPoint, ReconstructOptions};
use crate::rng;

/// Number of timed products behind [`matvec_time`].
pub const MATVEC_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Forests,
    Poly,
    Slq,
    Exact,
    ExactMoments,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Forests => "forests",
            Method::Poly => "poly",
            Method::Slq => "slq",
            Method::Exact => "exact",
            Method::ExactMoments => "exact-moments",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forests" => Ok(Method::Forests),
            "poly" => Ok(Method::Poly),
            "slq" => Ok(Method::Slq),
            "exact" => Ok(Method::Exact),
            "exact-moments" => Ok(Method::ExactMoments),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub alpha: f64,
    pub n_lambda: usize,
    pub l: usize,
    pub s: usize,
    pub p: usize,
    pub r: usize,
    pub seed: u64,
    pub exec: Exec,
    pub monotone: bool,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams { alpha: 100.0, n_lambda: 15, l: 3, s: 20, p: 50, r: 5, seed: 0, exec: Exec::default(), monotone: false }
    }
}

impl RunParams {
    fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig { alpha: self.alpha, n_lambda: self.n_lambda, l: self.l, s: self.s, seed: self.seed, exec: self.exec }
    }

    fn reconstruct_options(&self) -> ReconstructOptions {
        ReconstructOptions { monotone: self.monotone, exec: self.exec, ..ReconstructOptions::default() }
    }

    fn baseline(&self, tau_grid: Vec<f64>) -> BaselineConfig {
        BaselineConfig { p: self.p, r: self.r, tau_grid, seed: self.seed, exec: self.exec }
    }

    /// The evaluation grid shared by every method.
    pub fn grid(&self, g: &Graph) -> Result<Vec<f64>> {
        make_q_grid(g.mean_degree(), g.max_degree(), self.alpha, self.n_lambda)
    }

    /// The parameters relevant to `method`, for report headers.
    pub fn echo(&self, method: Method) -> serde_json::Value {
        let mut v = serde_json::json!({
            "method": method.as_str(),
            "alpha": self.alpha,
            "n_lambda": self.n_lambda,
            "seed": self.seed,
        });
        let obj = v.as_object_mut().expect("object literal");
        match method {
            Method::Forests => {
                obj.insert("l".into(), self.l.into());
                obj.insert("s".into(), self.s.into());
                obj.insert("monotone".into(), self.monotone.into());
            }
            Method::ExactMoments => {
                obj.insert("l".into(), self.l.into());
                obj.insert("monotone".into(), self.monotone.into());
            }
            Method::Poly | Method::Slq => {
                obj.insert("p".into(), self.p.into());
                obj.insert("r".into(), self.r.into());
            }
            Method::Exact => {}
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: String,
    pub config: serde_json::Value,
    pub n: usize,
    pub edges: usize,
    /// Estimation plus reconstruction, seconds.
    pub wall_time: f64,
    pub estimation_time: f64,
    pub reconstruction_time: f64,
    /// Median of [`MATVEC_SAMPLES`] warm `L·x` products, seconds.
    pub matvec_time: f64,
    /// `estimation_time / matvec_time`.
    pub normalized_time: f64,
    pub error: Option<f64>,
    pub max_error: Option<f64>,
    pub points: Vec<CdfPoint>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,c,status\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.x, p.c, p.status.as_str());
        }
        out
    }
}

fn seconds_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64().max(1e-9)
}

/// Median wall time of one `L·x` on a random `x`, after one warm-up product.
pub fn matvec_time(g: &Graph, seed: u64) -> f64 {
    use rand::Rng;
    let mut r = rng::stream(seed, &[0x4d56]);
    let x: Vec<f64> = (0..g.n()).map(|_| r.random::<f64>() - 0.5).collect();
    let mut y = vec![0.0; g.n()];
    g.laplacian_matvec_into(&x, &mut y).expect("matching length");
    let mut times: Vec<f64> = (0..MATVEC_SAMPLES)
        .map(|_| {
            let t = Instant::now();
            g.laplacian_matvec_into(std::hint::black_box(&x), &mut y).expect("matching length");
            std::hint::black_box(&y);
            seconds_since(t)
        })
        .collect();
    times.sort_by(f64::total_cmp);
    0.5 * (times[(MATVEC_SAMPLES - 1) / 2] + times[MATVEC_SAMPLES / 2])
}

fn spectrum_for(g: &Graph, spec: Option<&Spectrum>) -> Result<Spectrum> {
    match spec {
        Some(s) => Ok(s.clone()),
        None => exact_spectrum(g),
    }
}

/// Runs one method on `g`. `spec`, when given, is used for the error columns
/// and by the oracle methods in place of a fresh eigendecomposition.
pub fn run_method(
    g: &Graph,
    method: Method,
    params: &RunParams,
    spec: Option<&Spectrum>,
    matvec: Option<f64>,
) -> Result<RunReport> {
    let grid = params.grid(g)?;
    let matvec_time = matvec.unwrap_or_else(|| matvec_time(g, params.seed));
    let t0 = Instant::now();
    let (estimate, estimation_time, reconstruction_time, owned_spec) = match method {
        Method::Forests => {
            let table = estimate_on_grid(g, &grid, &params.estimator())?;
            let est_time = seconds_since(t0);
            let t1 = Instant::now();
            let e = reconstruct_cdf(&table, g.max_degree(), &params.reconstruct_options());
            (e, est_time, seconds_since(t1), None)
        }
        Method::Poly => {
            let e = kpm_cdf(g, &params.baseline(grid))?;
            (e, seconds_since(t0), 0.0, None)
        }
        Method::Slq => {
            let e = slq_cdf(g, &params.baseline(grid))?;
            (e, seconds_since(t0), 0.0, None)
        }
        Method::Exact => {
            let s = spectrum_for(g, spec)?;
            let e = exact_estimate(&s, &grid);
            (e, seconds_since(t0), 0.0, Some(s))
        }
        Method::ExactMoments => {
            let s = spectrum_for(g, spec)?;
            let table = exact_moment_table(s.eigenvalues(), &grid, params.l)?;
            let est_time = seconds_since(t0);
            let t1 = Instant::now();
            let e = reconstruct_cdf(&table, g.max_degree(), &params.reconstruct_options());
            (e, est_time, seconds_since(t1), Some(s))
        }
    };
    let truth = spec.or(owned_spec.as_ref());
    let (error, max_error) = match truth {
        Some(s) => (Some(cdf_error(&estimate, s)?), Some(cdf_max_error(&estimate, s)?)),
        None => (None, None),
    };
    Ok(RunReport {
        method: method.as_str().into(),
        config: params.echo(method),
        n: g.n(),
        edges: g.edge_count(),
        wall_time: estimation_time + reconstruction_time,
        estimation_time,
        reconstruction_time,
        matvec_time,
        normalized_time: estimation_time / matvec_time,
        error,
        max_error,
        points: estimate.points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Grid2d,
    Er,
    Ba,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Grid2d => "grid2d",
            Family::Er => "er",
            Family::Ba => "ba",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid2d" => Ok(Family::Grid2d),
            "er" => Ok(Family::Er),
            "ba" => Ok(Family::Ba),
            other => Err(Error::Config(format!("unknown graph family '{other}'"))),
        }
    }
}

/// Preferential-attachment parameter giving mean degree close to `mean_degree`.
pub fn ba_attach(mean_degree: f64) -> usize {
    ((mean_degree / 2.0).round() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: Family,
    pub n: usize,
    /// Ignored for `grid2d`, which needs `n` to be a perfect square.
    pub mean_degree: f64,
}

impl GraphSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        Ok(match self.family {
            Family::Grid2d => {
                let side = (self.n as f64).sqrt().round() as usize;
                if side * side != self.n {
                    return Err(Error::Config(format!("grid2d needs a square node count, got {}", self.n)));
                }
                graph::grid2d(side, side)?
            }
            Family::Er => graph::erdos_renyi(self.n, self.mean_degree, seed)?,
            Family::Ba => graph::barabasi_albert(self.n, ba_attach(self.mean_degree), seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub graphs: Vec<GraphSpec>,
    pub methods: Vec<Method>,
    pub s_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub r: usize,
    pub alpha: f64,
    pub n_lambda: usize,
    pub l: usize,
    pub repetitions: usize,
    pub realizations: usize,
    pub seed: u64,
    pub target_error: f64,
    /// Forests are timed to `floor + floor_margin` when a floor is known.
    pub floor_margin: f64,
    pub exec: Exec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            graphs: Vec::new(),
            methods: vec![Method::Forests, Method::Poly, Method::Slq],
            s_values: vec![1, 3, 5, 10, 20],
            p_values: vec![1, 2, 5, 10, 25, 50],
            r: 5,
            alpha: 100.0,
            n_lambda: 15,
            l: 3,
            repetitions: 50,
            realizations: 1,
            seed: 0,
            target_error: 0.02,
            floor_margin: 0.02,
            exec: Exec::default(),
        }
    }
}

fn parse_list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Config(format!("line {line}: bad value '{}' for {key}", x.trim())))
        })
        .collect()
}

fn parse_one<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("line {line}: bad value '{v}' for {key}")))
}

/// Parses the `key = value` bench format; `graph` may repeat.
pub fn parse_bench_config(text: &str) -> Result<BenchConfig> {
    let mut cfg = BenchConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "graph" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let [family, n, rest @ ..] = parts.as_slice() else {
                    return Err(Error::Config(format!("line {line}: expected 'graph = family n mean_degree'")));
                };
                let family: Family = family.parse().map_err(|e: Error| Error::Config(format!("line {line}: {e}")))?;
                let mean_degree = match (family, rest) {
                    (_, [d]) => parse_one(line, "mean_degree", d)?,
                    (Family::Grid2d, []) => 4.0,
                    _ => return Err(Error::Config(format!("line {line}: expected 'graph = family n mean_degree'"))),
                };
                cfg.graphs.push(GraphSpec { family, n: parse_one(line, "n", n)?, mean_degree });
            }
            "methods" => {
                cfg.methods = value
                    .split(',')
                    .map(|m| m.trim().parse().map_err(|e: Error| Error::Config(format!("line {line}: {e}"))))
                    .collect::<Result<_>>()?;
                if cfg.methods.contains(&Method::Exact) {
                    return Err(Error::Config(format!("line {line}: 'exact' is the reference, not a benchmark method")));
                }
            }
            "s" => cfg.s_values = parse_list(line, key, value)?,
            "p" => cfg.p_values = parse_list(line, key, value)?,
            "r" => cfg.r = parse_one(line, key, value)?,
            "alpha" => cfg.alpha = parse_one(line, key, value)?,
            "n_lambda" => cfg.n_lambda = parse_one(line, key, value)?,
            "l" => cfg.l = parse_one(line, key, value)?,
            "repetitions" => cfg.repetitions = parse_one(line, key, value)?,
            "realizations" => cfg.realizations = parse_one(line, key, value)?,
            "seed" => cfg.seed = parse_one(line, key, value)?,
            "target_error" => cfg.target_error = parse_one(line, key, value)?,
            "floor_margin" => cfg.floor_margin = parse_one(line, key, value)?,
            "exec" => {
                cfg.exec = match value {
                    "parallel" => Exec::Parallel,
                    "sequential" => Exec::Sequential,
                    other => return Err(Error::Config(format!("line {line}: unknown exec mode '{other}'"))),
                }
            }
            other => return Err(Error::Config(format!("line {line}: unknown key '{other}'"))),
        }
    }
    if cfg.graphs.is_empty() {
        return Err(Error::Config("no 'graph' lines".into()));
    }
    if cfg.repetitions == 0 || cfg.realizations == 0 {
        return Err(Error::Config("repetitions and realizations must be at least 1".into()));
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub method: Method,
    pub param: usize,
    pub mean_error: Option<f64>,
    pub stderr_error: Option<f64>,
    pub mean_normtime: f64,
    pub stderr_normtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub family: Family,
    pub n: usize,
    pub edges: f64,
    pub method: Method,
    pub target: f64,
    /// Cheapest parameter whose mean error meets the target.
    pub param: Option<usize>,
    pub normtime: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub targets: Vec<TargetRow>,
    pub warnings: Vec<String>,
}

/// `(mean, standard error)`; the error is 0 for a single sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Cell {
    error: Option<f64>,
    normtime: f64,
}

fn sweep(cfg: &BenchConfig, method: Method) -> Vec<usize> {
    match method {
        Method::Forests => cfg.s_values.clone(),
        Method::Poly | Method::Slq => cfg.p_values.clone(),
        Method::Exact | Method::ExactMoments => vec![cfg.l],
    }
}

fn params_for(cfg: &BenchConfig, method: Method, param: usize, seed: u64) -> RunParams {
    let mut p = RunParams {
        alpha: cfg.alpha,
        n_lambda: cfg.n_lambda,
        l: cfg.l,
        r: cfg.r,
        seed,
        exec: Exec::Sequential,
        ..RunParams::default()
    };
    match method {
        Method::Forests => p.s = param,
        Method::Poly | Method::Slq => p.p = param,
        Method::Exact | Method::ExactMoments => p.l = param,
    }
    p
}

/// Runs the sweep. Realizations × repetitions fan out over `cfg.exec`; each
/// run itself is sequential.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult> {
    let mut result = BenchResult::default();
    for (gi, gs) in cfg.graphs.iter().enumerate() {
        let mut cells: BTreeMap<(Method, usize), Vec<Cell>> = BTreeMap::new();
        let mut edges = Vec::new();
        for real in 0..cfg.realizations {
            let g = gs.generate(rng::derive_seed(cfg.seed, &[0x4752, gi as u64, real as u64]))?;
            edges.push(g.edge_count() as f64);
            let spec = if g.n() <= SPECTRUM_LIMIT {
                Some(exact_spectrum(&g)?)
            } else {
                result.warnings.push(format!(
                    "{} n={}: {} nodes exceeds the oracle limit, errors skipped",
                    gs.family.as_str(),
                    gs.n,
                    g.n()
                ));
                None
            };
            let mv = matvec_time(&g, cfg.seed);
            let mut methods = cfg.methods.clone();
            // the forest target sits on the exact-moment floor
            if methods.contains(&Method::Forests) && !methods.contains(&Method::ExactMoments) {
                methods.push(Method::ExactMoments);
            }
            let units: Vec<(Method, usize)> = methods
                .iter()
                .filter(|m| spec.is_some() || **m != Method::ExactMoments)
                .flat_map(|&m| sweep(cfg, m).into_iter().map(move |p| (m, p)))
                .collect();
            let reps = if units.is_empty() { 0 } else { cfg.repetitions };
            let runs = exec::try_map_indexed(cfg.exec, reps, |rep| -> Result<Vec<Cell>> {
                let seed = rng::derive_seed(cfg.seed, &[gi as u64, real as u64, rep as u64]);
                units
                    .iter()
                    .map(|&(m, param)| {
                        let r = run_method(&g, m, &params_for(cfg, m, param, seed), spec.as_ref(), Some(mv))?;
                        Ok(Cell { error: r.error, normtime: r.normalized_time })
                    })
                    .collect()
            })?;
            for rep in runs {
                for (unit, cell) in units.iter().zip(rep) {
                    cells.entry(*unit).or_default().push(cell);
                }
            }
        }
        let mean_edges = edges.iter().sum::<f64>() / edges.len() as f64;
        let mut rows = Vec::new();
        for ((method, param), cs) in &cells {
            let times: Vec<f64> = cs.iter().map(|c| c.normtime).collect();
            let errors: Option<Vec<f64>> = cs.iter().map(|c| c.error).collect();
            let (mean_normtime, stderr_normtime) = mean_stderr(&times);
            let (mean_error, stderr_error) = match errors {
                Some(e) => {
                    let (m, s) = mean_stderr(&e);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            rows.push(BenchRow {
                family: gs.family,
                n: gs.n,
                method: *method,
                param: *param,
                mean_error,
                stderr_error,
                mean_normtime,
                stderr_normtime,
            });
        }
        let floor = rows.iter().find(|r| r.method == Method::ExactMoments).and_then(|r| r.mean_error);
        for &method in cfg.methods.iter().filter(|m| **m != Method::ExactMoments) {
            let target = match (method, floor) {
                (Method::Forests, Some(f)) => f + cfg.floor_margin,
                _ => cfg.target_error,
            };
            let hit = rows
                .iter()
                .filter(|r| r.method == method && r.mean_error.is_some_and(|e| e <= target))
                .min_by(|a, b| a.mean_normtime.total_cmp(&b.mean_normtime));
            result.targets.push(TargetRow {
                family: gs.family,
                n: gs.n,
                edges: mean_edges,
                method,
                target,
                param: hit.map(|r| r.param),
                normtime: hit.map(|r| r.mean_normtime),
            });
        }
        result.rows.extend(rows);
    }
    Ok(result)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| v.to_string())
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("family,n,method,param,mean_error,stderr_error,mean_normtime,stderr_normtime\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.family.as_str(),
            r.n,
            r.method.as_str(),
            r.param,
            opt(r.mean_error),
            opt(r.stderr_error),
            r.mean_normtime,
            r.stderr_normtime
        );
    }
    out
}

pub fn targets_csv(rows: &[TargetRow]) -> String {
    let mut out = String::from("family,n,edges,method,target,param,normtime\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.family.as_str(),
            r.n,
            r.edges,
            r.method.as_str(),
            r.target,
            r.param.map_or_else(|| "NA".into(), |p| p.to_string()),
            opt(r.normtime)
        );
    }
    out
}

const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Error against normalised time (log axis), one series per method, for the
/// rows of one graph. `None` when no row carries an error.
pub fn svg_plot(title: &str, rows: &[BenchRow]) -> Option<String> {
    let pts: Vec<(&BenchRow, f64)> = rows.iter().filter_map(|r| r.mean_error.map(|e| (r, e))).collect();
    if pts.is_empty() {
        return None;
    }
    let (w, h, left, right, top, bottom) = (640.0, 420.0, 70.0, 150.0, 40.0, 50.0);
    let lt = |r: &BenchRow| r.mean_normtime.max(1e-12).log10();
    let mut xmin = pts.iter().map(|(r, _)| lt(r)).fold(f64::INFINITY, f64::min).floor();
    let mut xmax = pts.iter().map(|(r, _)| lt(r)).fold(f64::NEG_INFINITY, f64::max).ceil();
    if xmax <= xmin {
        xmin -= 1.0;
        xmax += 1.0;
    }
    let ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-3) * 1.05;
    let px = |x: f64| left + (x - xmin) / (xmax - xmin) * (w - left - right);
    let py = |y: f64| h - bottom - y / ymax * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, (left + w - right) / 2.0, xml_escape(title));
    let (x0, x1, y0, y1) = (px(xmin), px(xmax), py(0.0), py(ymax));
    let _ = writeln!(s, r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" fill="none" stroke="black"/>"#);
    let mut d = xmin as i32;
    while d as f64 <= xmax {
        let x = px(d as f64);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{d}</text>"#, y0 + 18.0);
        d += 1;
    }
    for i in 0..=4 {
        let v = ymax * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.3}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">time / matvec</text>"#, (x0 + x1) / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">mean absolute error</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);
    let mut methods: Vec<Method> = pts.iter().map(|(r, _)| r.method).collect();
    methods.dedup();
    methods.sort();
    methods.dedup();
    for (k, m) in methods.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut series: Vec<(f64, f64)> =
            pts.iter().filter(|(r, _)| r.method == *m).map(|(r, e)| (px(lt(r)), py(*e))).collect();
        series.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = series.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        for (x, y) in &series {
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 20.0 + 18.0 * k as f64;
        let lx = w - right + 15.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#, lx + 26.0, ly + 4.0, m.as_str());
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One plot per configured graph, keyed by `family_n`.
pub fn svg_plots(result: &BenchResult) -> Vec<(String, String)> {
    let mut keys: Vec<(Family, usize)> = result.rows.iter().map(|r| (r.family, r.n)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|(f, n)| {
            let rows: Vec<BenchRow> = result.rows.iter().filter(|r| r.family == f && r.n == n).cloned().collect();
            let name = format!("{}_{}", f.as_str(), n);
            svg_plot(&format!("{} n = {}", f.as_str(), n), &rows).map(|svg| (name, svg))
        })
        .collect()
}
