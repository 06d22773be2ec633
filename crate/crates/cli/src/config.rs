//! Command-line grammar and the validated run configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqzero_core::domain::read_domain_file;
use eqzero_core::{Complex64, DomainSpec, WeightSpec};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Largest degree accepted without `--extended-precision`.
pub const MAX_DOUBLE_DEGREE: usize = 60;

#[derive(Debug, Parser)]
#[command(
    name = "eqzero",
    version,
    about = "Zeros of random polynomials orthonormal on planar domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthonormal basis in monomial form and its Gram residual.
    Basis(BasisArgs),
    /// Universal curves κ^T, κ^⊥ and D∞ on a grid.
    ScalingCurves(CurvesArgs),
    /// Monte Carlo experiments on random polynomial zeros.
    Montecarlo(MonteCarloArgs),
    /// Szegő, Carleman and scaled-kernel convergence studies.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Domain file (TOML) or builtin name: disk, perturbed, ellipse:<m>[:<c>].
    #[arg(long, default_value = "disk")]
    pub domain: String,
    /// Boundary weight, `constant:<v>` or `exp_cos:<a>`; overrides the file.
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub degree: usize,
    /// Quadrature nodes; defaults to max(256, 8(N+2)).
    #[arg(long)]
    pub quad: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Compensated inner products; lifts the N <= 60 limit.
    #[arg(long)]
    pub extended_precision: bool,
    /// Worker threads for the trial fan-out.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasisArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Upper end of the separation grid (D∞ uses [-range, range]).
    #[arg(long, default_value_t = 10.0)]
    pub range: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Density,
    Correlation,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionArg {
    Tangential,
    Normal,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Experiment::Density)]
    pub experiment: Experiment,
    /// Histogram bins (density).
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Band half-width in `|Φ| - 1` counted as near the boundary (density).
    #[arg(long, default_value_t = 0.1)]
    pub band: f64,
    #[arg(long, default_value_t = 0.2)]
    pub radial_range: f64,
    /// Histogram `N(|Φ| - 1)` instead of `|Φ| - 1` (density).
    #[arg(long)]
    pub scale_radial: bool,
    /// Degrees for the variance experiment.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub n_list: Vec<usize>,
    /// Test function center `re,im` (variance); defaults to the domain center.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi_center: Option<Vec<f64>>,
    /// Test function radius (variance); defaults to 1.2 times the capacity.
    #[arg(long)]
    pub phi_width: Option<f64>,
    #[arg(long, value_enum, default_value_t = SectionArg::Tangential)]
    pub section: SectionArg,
    /// Scaled separations (correlation).
    #[arg(long, value_delimiter = ',', default_value = "2,3.141592653589793,6")]
    pub separations: Vec<f64>,
    /// Scaled band `|τ| <` for anchors (correlation).
    #[arg(long, default_value_t = 0.3)]
    pub pair_band: f64,
    /// Half-width of each separation bin (correlation).
    #[arg(long, default_value_t = 0.25)]
    pub half_width: f64,
    /// Tangential half-width of the normal-section window (correlation).
    #[arg(long, default_value_t = 1.0)]
    pub tangential_half_width: f64,
    /// Relative tolerance against the closed form (correlation).
    #[arg(long, default_value_t = 0.15)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymptoticsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Exterior point `re,im`; defaults to Ψ(2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Degrees for the scaled kernel study.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    pub n_list: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1,1"
    )]
    pub zeta1: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0.5,0"
    )]
    pub zeta2: Vec<f64>,
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub weight: WeightSpec,
    pub degree: usize,
    pub quad: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub extended_precision: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        if args.degree == 0 {
            return Err(config_err("--degree must be positive"));
        }
        if args.degree > MAX_DOUBLE_DEGREE && !args.extended_precision {
            return Err(config_err(format!(
                "--degree {} exceeds {MAX_DOUBLE_DEGREE}; pass --extended-precision",
                args.degree
            )));
        }
        if args.trials == 0 {
            return Err(config_err("--trials must be positive"));
        }
        if args.quad == Some(0) {
            return Err(config_err("--quad must be positive"));
        }
        if args.workers == Some(0) {
            return Err(config_err("--workers must be positive"));
        }
        let (domain, file_weight) = resolve_domain(&args.domain)?;
        let weight = match &args.weight {
            Some(s) => s.parse::<WeightSpec>()?,
            None => file_weight,
        };
        Ok(Self {
            domain,
            weight,
            degree: args.degree,
            quad: args
                .quad
                .unwrap_or_else(|| (8 * (args.degree + 2)).max(256)),
            trials: args.trials,
            seed: args.seed,
            out: args.out.clone(),
            extended_precision: args.extended_precision,
        })
    }
}

fn resolve_domain(spec: &str) -> Result<(DomainSpec, WeightSpec)> {
    let path = Path::new(spec);
    if path.is_file() {
        let file = read_domain_file(path)?;
        return Ok((file.domain, file.weight));
    }
    match DomainSpec::builtin(spec) {
        Ok(d) => Ok((d, WeightSpec::constant(1.0))),
        Err(_) => Err(config_err(format!(
            "--domain `{spec}` is neither a readable file nor a builtin (disk, perturbed, ellipse:<m>[:<c>])"
        ))),
    }
}

pub fn complex_arg(values: &[f64], flag: &str) -> Result<Complex64> {
    match values {
        [re, im] => Ok(Complex64::new(*re, *im)),
        [re] => Ok(Complex64::new(*re, 0.0)),
        _ => Err(config_err(format!("{flag} expects `re,im`"))),
    }
}

pub fn positive(value: f64, flag: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(config_err(format!("{flag} must be positive, got {value}")))
    }
}

pub fn degree_list(values: &[usize], flag: &str) -> Result<Vec<usize>> {
    if values.is_empty() || values.contains(&0) {
        return Err(config_err(format!("{flag} needs positive degrees")));
    }
    Ok(values.to_vec())
}
