use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitemp_core::analytic::RateMethod;
use hitemp_core::model::AlphaConvention;

#[derive(Debug, Parser)]
#[command(name = "hitemp", version, about = "Gaussian beta-ensemble laboratory at high temperature")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one tridiagonal matrix and print it in the dump format.
    Sample(SampleArgs),
    /// Spectrum of a dumped matrix.
    Eig(EigArgs),
    /// J(x) and φ(x) over an x grid.
    Rate(RateArgs),
    /// Exact vs asymptotic partition-function ratios along a schedule.
    Partition(PartitionArgs),
    /// Empirical P(|λ₁| ≥ t) against the analytic tail bound.
    Tail(TailArgs),
    /// Empirical tail probabilities of λ_max and their rate against J.
    Sweep(SweepArgs),
    /// Distance of the empirical spectral measure to the semicircle.
    Esd(EsdArgs),
    /// Run the acceptance criteria.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Convention {
    HalfNBeta,
    OnePlusHalfNBeta,
}

impl From<Convention> for AlphaConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::HalfNBeta => AlphaConvention::HalfNBeta,
            Convention::OnePlusHalfNBeta => AlphaConvention::OnePlusHalfNBeta,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Closed,
    Quadrature,
}

impl From<Method> for RateMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Closed => RateMethod::ClosedForm,
            Method::Quadrature => RateMethod::Quadrature,
        }
    }
}

/// Output destinations shared by every subcommand.
#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a run manifest that replays this run via --config.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Write the campaign's assertions as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// ExperimentConfig overrides. Unset flags fall back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON ExperimentConfig, or a manifest written by --manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Schedule name: invlogsq, invlog, invlog:<p>, power:<gamma> or const.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Schedule constant c.
    #[arg(long)]
    pub c: Option<f64>,
    /// Comma-separated matrix sizes; scientific notation is accepted.
    #[arg(long, value_parser = parse_count_list)]
    pub n: Option<Counts>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative bisection tolerance.
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long, env = "HITEMP_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub alpha_convention: Option<Convention>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replica index within the seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, value_enum, default_value = "half-n-beta")]
    pub alpha_convention: Convention,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    /// Matrix dump written by `sample`; `-` reads stdin.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Absolute bisection tolerance; defaults to 1e-10 of the Gershgorin width.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Grid as start:step:stop (inclusive) or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub x: Option<Grid>,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: Method,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    /// Levels t, as start:step:stop or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub t: Option<Grid>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Levels x ≥ 2, as start:step:stop or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub x: Option<Grid>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EsdArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Comma-separated criterion ids; all ten by default.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
    #[arg(long, env = "HITEMP_WORKERS")]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// A parsed real grid; a newtype so clap treats it as one value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Counts(pub Vec<usize>);

fn parse_count(s: &str) -> Result<usize, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

pub fn parse_count_list(s: &str) -> Result<Counts, String> {
    s.split(',').map(parse_count).collect::<Result<_, _>>().map(Counts)
}

/// `a:step:b` (inclusive of b up to rounding) or `x1,x2,...`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    parse_reals(s).map(Grid)
}

fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0 && step.is_finite() && a.is_finite() && b >= a) {
                return Err(format!("need start <= stop and a positive step in {s:?}"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected start:step:stop or a list, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("2:0.1:3").unwrap().0;
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 2.0);
        assert!((g[10] - 3.0).abs() < 1e-12);
        assert_eq!(parse_grid("2.5").unwrap().0, vec![2.5]);
        assert_eq!(parse_grid("2,3").unwrap().0, vec![2.0, 3.0]);
        assert!(parse_grid("3:0.1:2").is_err());
        assert!(parse_grid("2:0:3").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count_list("1e3,1e4,250").unwrap().0, vec![1000, 10_000, 250]);
        assert!(parse_count_list("1.5").is_err());
        assert!(parse_count_list("-3").is_err());
    }
}
