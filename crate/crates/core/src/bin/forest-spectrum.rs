use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use forest_spectrum::error::{Error, Result};
use forest_spectrum::experiment::{self, ba_attach, Method, RunParams};
use forest_spectrum::graph::{self, read_edgelist, Graph};
use forest_spectrum::oracle::exact_spectrum;
use forest_spectrum::Exec;

#[derive(Parser)]
#[command(name = "forest-spectrum", version, about = "Spectral CDF estimation of graph Laplacians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list.
    Generate {
        #[command(subcommand)]
        kind: GraphKind,
    },
    /// Estimate the spectral CDF of a graph on the q-grid.
    Estimate(EstimateArgs),
    /// Run an error-versus-time sweep described by a config file.
    Bench {
        config: PathBuf,
        /// Summary CSV; the time-to-target table and SVG plots go next to it.
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GraphKind {
    Grid2d {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mean_degree: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Ba {
        #[arg(long)]
        n: usize,
        /// Attachment count is half of this, rounded.
        #[arg(long)]
        mean_degree: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Forests,
    Poly,
    Slq,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecArg {
    Parallel,
    Sequential,
}

#[derive(Args)]
struct EstimateArgs {
    graph: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,
    #[arg(long, default_value_t = 15)]
    n_lambda: usize,
    #[arg(long, default_value_t = 3)]
    l: usize,
    #[arg(long, default_value_t = 20)]
    s: usize,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long, default_value_t = 5)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ExecArg::Parallel)]
    exec: ExecArg,
    /// With `--method exact`: reconstruct from exact moments instead.
    #[arg(long)]
    exact_moments: bool,
    /// Isotonic post-processing of forest reconstructions.
    #[arg(long)]
    monotone: bool,
    /// Compute the exact spectrum to report errors.
    #[arg(long)]
    oracle: bool,
    /// CSV output (`x,c,status`); stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// JSON report; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn seed_override(seed: u64) -> Result<u64> {
    match std::env::var("SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Config(format!("SEED must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(seed),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(kind: GraphKind) -> Result<()> {
    let (g, out): (Graph, Option<PathBuf>) = match kind {
        GraphKind::Grid2d { rows, cols, out } => (graph::grid2d(rows, cols)?, out),
        GraphKind::Er { n, mean_degree, seed, out } => (graph::erdos_renyi(n, mean_degree, seed_override(seed)?)?, out),
        GraphKind::Ba { n, mean_degree, seed, out } => {
            (graph::barabasi_albert(n, ba_attach(mean_degree), seed_override(seed)?)?, out)
        }
    };
    emit(out.as_deref(), &graph::format_edgelist(&g))
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let g = read_edgelist(&args.graph)?;
    let method = match (args.method, args.exact_moments) {
        (MethodArg::Exact, true) => Method::ExactMoments,
        (_, true) => return Err(Error::Config("--exact-moments requires --method exact".into())),
        (MethodArg::Forests, _) => Method::Forests,
        (MethodArg::Poly, _) => Method::Poly,
        (MethodArg::Slq, _) => Method::Slq,
        (MethodArg::Exact, _) => Method::Exact,
    };
    let params = RunParams {
        alpha: args.alpha,
        n_lambda: args.n_lambda,
        l: args.l,
        s: args.s,
        p: args.p,
        r: args.r,
        seed: seed_override(args.seed)?,
        exec: match args.exec {
            ExecArg::Parallel => Exec::Parallel,
            ExecArg::Sequential => Exec::Sequential,
        },
        monotone: args.monotone,
    };
    let spec = if args.oracle || matches!(method, Method::Exact | Method::ExactMoments) {
        Some(exact_spectrum(&g)?)
    } else {
        None
    };
    let report = experiment::run_method(&g, method, &params, spec.as_ref(), None)?;
    emit(args.out.as_deref(), &report.to_csv())?;
    let report_path = args.report.or_else(|| args.out.as_ref().map(|p| p.with_extension("json")));
    if let Some(p) = report_path {
        write_file(&p, &serde_json::to_string_pretty(&report)?)?;
    }
    match report.error {
        Some(e) => eprintln!(
            "{}: n = {}, |E| = {}, time/matvec = {:.1}, mean abs error = {e:.5}",
            report.method, report.n, report.edges, report.normalized_time
        ),
        None => eprintln!(
            "{}: n = {}, |E| = {}, time/matvec = {:.1}",
            report.method, report.n, report.edges, report.normalized_time
        ),
    }
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bench".into());
    out.with_file_name(format!("{stem}_{suffix}"))
}

fn bench(config: &Path, out: &Path) -> Result<()> {
    let text = fs::read_to_string(config).map_err(|source| Error::Io { path: config.to_path_buf(), source })?;
    let mut cfg = experiment::parse_bench_config(&text)?;
    cfg.seed = seed_override(cfg.seed)?;
    let result = experiment::run_bench(&cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    write_file(out, &experiment::bench_csv(&result.rows))?;
    write_file(&sibling(out, "targets.csv"), &experiment::targets_csv(&result.targets))?;
    for (name, svg) in experiment::svg_plots(&result) {
        write_file(&sibling(out, &format!("{name}.svg")), &svg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let res = match cli.command {
        Command::Generate { kind } => generate(kind),
        Command::Estimate(args) => estimate(args),
        Command::Bench { config, out } => bench(&config, &out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
