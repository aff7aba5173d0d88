use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "axidiff",
    version,
    about = "Radial heat equation solutions by four independent methods"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate u(r, t) on a grid with one method.
    Eval(EvalArgs),
    /// Evaluate with several methods and check their pairwise agreement.
    Compare(CompareArgs),
    /// Partial sums of a residue series against the quadrature oracle.
    Convergence(ConvergenceArgs),
    /// Run the invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcKind {
    Gaussian,
    Disk,
    J0,
    J0sq,
    Ivkv,
    LogGaussian,
    LogDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Quadrature,
    Contour,
    Fd,
    Log,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::Contour => "contour",
            Method::Fd => "fd",
            Method::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// The initial profile and diffusivity.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub ic: IcKind,
    /// Bessel scale for j0, j0sq and ivkv.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Gaussian rate: g = exp(-c r^2).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Order of the ivkv profile, non-integer in (0, 1).
    #[arg(long)]
    pub v: Option<f64>,
    /// Disk radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Diffusivity
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
}

/// Comma list `0,0.5,1` or inclusive range `lo:hi:step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValueList(pub Vec<f64>);

pub fn parse_values(s: &str) -> Result<ValueList, String> {
    let number = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("'{s}': expected lo:hi:step"));
        };
        let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
        if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(format!("'{s}': need lo <= hi and step > 0"));
        }
        let span = (hi - lo) / step;
        let n = (span + 1e-9 * span.max(1.0)).floor();
        if n > 1e6 {
            return Err(format!("'{s}': more than a million points"));
        }
        (0..=n as usize).map(|k| lo + k as f64 * step).collect()
    } else {
        s.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(format!("'{s}': need at least one finite value"));
    }
    Ok(ValueList(values))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Radii: `0,0.5,1` or `lo:hi:step`
    #[arg(long, value_parser = parse_values)]
    pub r: ValueList,
    /// Times, same syntax as --r
    #[arg(long, value_parser = parse_values)]
    pub t: ValueList,
}

impl GridArgs {
    /// Points in output order: r outer, t inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.r
            .0
            .iter()
            .flat_map(|&r| self.t.0.iter().map(move |&t| (r, t)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct FdArgs {
    /// Radial intervals for the fd method.
    #[arg(long, default_value_t = 2400)]
    pub nr: usize,
    /// Time steps for the fd method.
    #[arg(long, default_value_t = 800)]
    pub nt: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Target accuracy passed to the method
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    #[serde(flatten)]
    pub fd: FdArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Comma-separated methods.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub methods: Vec<Method>,
    /// Largest acceptable absolute difference between any two methods.
    #[arg(long, default_value_t = 1e-6)]
    pub cross_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub fd: FdArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub t: f64,
    /// Number of rows; by default the count the stopping rule uses at --tol.
    #[arg(long)]
    pub max_n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InjectArg {
    /// Halve the J0^2 series constant.
    HalfJ0sq,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Only run properties of this module.
    #[arg(long)]
    pub filter: Option<String>,
    /// Break a constant on purpose; the suite must then fail.
    #[arg(long, value_enum)]
    pub inject: Option<InjectArg>,
}
