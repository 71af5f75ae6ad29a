//! Spectral CDF estimation for graph Laplacians from random rooted spanning
//! forests, with polynomial (Chebyshev) and Lanczos baselines and a dense
//! oracle for validation.

pub mod baselines;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod forest;
pub mod graph;
pub mod maxent;
pub mod moments;
pub mod oracle;
pub mod quadrature;
pub mod reconstruct;
pub mod rng;

pub use baselines::{kpm_cdf, slq_cdf, BaselineConfig};
pub use error::{Error, GraphError, MaxEntError, Result};
pub use exec::Exec;
pub use forest::{sample_forest, ForestSampler, RootMap, RootedForest};
pub use graph::{Edge, Graph};
pub use maxent::{fit_maxent, MaxEntModel, MomentVector};
pub use moments::{estimate_moment_table, EstimatorConfig, MomentTable};
pub use oracle::{exact_cdf, exact_h, exact_spectrum, Spectrum};
pub use reconstruct::{reconstruct_cdf, CdfPoint, PointStatus, ReconstructOptions, SpectralCdfEstimate};
pub use experiment::{run_method, Method, RunParams, RunReport};
