//! `conewhit`: evaluate, sample, tabulate and verify from the command line.
//!
//! Exit status 0 on success, 1 when a verification fails, 2 on usage or
//! domain errors.

mod commands;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use conewhit::config::RunConfig;

use output::Format;

pub const SEED_ENV: &str = "CONEWHIT_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] conewhit::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "conewhit", version, about = "Matrix-variate gamma and Whittaker computations")]
struct Cli {
    /// Root seed; falls back to CONEWHIT_SEED, then the config default.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Relative tolerance of quadrature paths.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Record wall time in verification reports.
    #[arg(long, global = true)]
    timing: bool,
    /// Worker threads for Monte Carlo loops; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run settings and default cases (TOML); the shipped defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multivariate gamma function Γ_p(α), or its complex analogue.
    Gammap {
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        complex: bool,
    },
    /// M-function M(α, β; A).
    Mfun {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long = "A")]
        a: String,
    },
    /// Real Whittaker function W_{a,b}(A).
    Whittaker(WhittakerArgs),
    /// Complex Whittaker function W̃_{a,b}(A); entries as `re+imi`.
    WhittakerComplex(WhittakerArgs),
    /// Residual density over a grid, as CSV.
    Density(DensityArgs),
    /// Draws from a gamma or residual law.
    Sample(SampleArgs),
    /// Orientation class frequencies of residual draws.
    Orient(OrientArgs),
    /// Verify one identity, or `all`, over its default or given cases.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct WhittakerArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long = "A")]
    matrix: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityModel {
    Scalar,
    Matrix,
    Complex,
}

#[derive(Debug, Args)]
struct ResidualArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha2: f64,
    /// Scalar scale of the first input.
    #[arg(long, default_value_t = 1.0)]
    beta1: f64,
    /// Scalar scale of the second input.
    #[arg(long, default_value_t = 1.0)]
    beta2: f64,
    /// Rate matrix of the first input (matrix models).
    #[arg(long = "B1")]
    b1: Option<String>,
    /// Rate matrix of the second input (matrix models).
    #[arg(long = "B2")]
    b2: Option<String>,
    /// Dimension used when no rate matrices are given.
    #[arg(long, default_value_t = 2)]
    p: usize,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(long, value_enum)]
    model: DensityModel,
    #[command(flatten)]
    residual: ResidualArgs,
    /// `lo:hi:step`; for matrix models the density is tabulated at `t·Y`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Direction matrix of the matrix-model grid (identity by default).
    #[arg(long = "Y", allow_hyphen_values = true)]
    y: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleModel {
    Gamma,
    Residual,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    model: SampleModel,
    #[arg(long)]
    n: usize,
    /// Shape of the gamma law.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Rate matrix of the gamma law (identity of dimension --p by default).
    #[arg(long = "B")]
    b: Option<String>,
    #[command(flatten)]
    residual: ResidualArgs,
    /// Matrix residual even without rate matrices.
    #[arg(long)]
    matrix: bool,
    /// Hermitian cone.
    #[arg(long)]
    complex: bool,
    /// Per-entry mean and standard deviation instead of the draws.
    #[arg(long)]
    summary: bool,
}

#[derive(Debug, Args)]
struct OrientArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    residual: ResidualArgs,
    #[arg(long)]
    complex: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// eq2.2, thm2.1, thm2.3, thm3.1, thm3.2, scalar-reduction or all.
    id: String,
    /// Keep only default cases of this dimension.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long = "U")]
    u: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long)]
    max_degree: Option<usize>,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_toml_str(&std::fs::read_to_string(path)?)?,
        None => RunConfig::defaults(),
    };
    let run = &mut config.run;
    if let Some(seed) = cli.seed {
        run.seed = seed;
    } else if let Ok(s) = std::env::var(SEED_ENV) {
        run.seed = s.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV} is not an unsigned integer: {s:?}")))?;
    }
    if let Some(n) = cli.samples {
        run.samples = n;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        run.tol = t;
    }
    run.timing = cli.timing;
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let config = load_config(cli)?;
    let out = commands::dispatch(&cli.command, config)?;
    let text = out.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(out.passed.unwrap_or(true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
