use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slowbond::algebra::{parse_rational, BigRational};
use slowbond::model::Geometry;

use crate::output::Format;

pub const PRECISION_ENV: &str = "SLOWBOND_PRECISION_BITS";

#[derive(Debug, Parser)]
#[command(name = "slowbond", version, about = "Series, exact solutions and simulation for the TASEP with a slow bond")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Working precision for multiprecision floats.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..=8192))]
    pub precision_bits: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Taylor coefficients of the current and densities.
    Expand(ExpandArgs),
    /// Exact rational current of a small system and its denominator zeros.
    Exact(ExactArgs),
    /// Semi-infinite model: polynomial identities, series, zeros.
    Semi(SemiArgs),
    /// Analysis of the reference current coefficients.
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimate of the slow-bond current.
    Simulate(SimulateArgs),
    /// Three coupled systems checking the counter ordering.
    Couple(CoupleArgs),
    /// Data files behind the figures.
    Figures(FiguresArgs),
    /// Compare an expansion with the reference tables.
    Golden(GoldenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Ring,
    Interval,
}

#[derive(Clone, Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value = "ring")]
    pub geometry: GeometryArg,
    /// Half-size: sites -L+1..L.
    #[arg(long = "L")]
    pub l: usize,
    /// Entry rate of an interval.
    #[arg(long, default_value = "1", value_parser = rational)]
    pub alpha: BigRational,
    /// Exit rate of an interval.
    #[arg(long, default_value = "1", value_parser = rational)]
    pub beta: BigRational,
}

impl GeometryArgs {
    pub fn build(&self) -> Geometry {
        match self.geometry {
            GeometryArg::Ring => Geometry::ring(self.l),
            GeometryArg::Interval => Geometry::interval(self.l, self.alpha.clone(), self.beta.clone()),
        }
    }
}

pub fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// `lo..hi` or `lo,hi`, inclusive.
pub fn window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once(','))
        .ok_or_else(|| format!("window {s:?} is not lo..hi"))?;
    let lo = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let hi = b.trim().trim_start_matches('=').parse::<usize>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err(format!("window {s:?} is empty"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Highest order; defaults to L.
    #[arg(long)]
    pub order: Option<usize>,
    /// Omit the density coefficients.
    #[arg(long)]
    pub no_densities: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Rational points at which to evaluate the current.
    #[arg(long = "at", value_delimiter = ',', value_parser = rational)]
    pub at: Vec<BigRational>,
}

#[derive(Debug, Args)]
pub struct SemiArgs {
    /// Check the explicit and recursive forms of Q_L for L = 0..=L-max.
    #[arg(long)]
    pub check_recursion: bool,
    #[arg(long = "L-max", default_value_t = 200)]
    pub l_max: usize,
    /// Sizes for series and zeros.
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Vec<usize>,
    /// Series order; defaults to L + 2.
    #[arg(long)]
    pub order: Option<usize>,
    /// Zeros of Q_L and their scaling exponents.
    #[arg(long)]
    pub zeros: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeMethod {
    Pole1,
    Pole2,
    Fits,
    Kapprox,
    Gammahat,
    Asympt,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub method: AnalyzeMethod,
    /// Pole location used by fits, kapprox and gammahat.
    #[arg(long, default_value_t = -1.5437, allow_negative_numbers = true)]
    pub r0: f64,
    /// Fit window, inclusive.
    #[arg(long, default_value = "7..16", value_parser = window)]
    pub window: (usize, usize),
    /// Reference point of the fractional linear map.
    #[arg(long, default_value_t = -1.5, allow_negative_numbers = true)]
    pub r1: f64,
    /// Search grid `lo:hi:step` for the pole.
    #[arg(long, default_value = "-1.55:-1.53:0.0001", allow_hyphen_values = true)]
    pub grid: String,
    /// Output order of the approximant.
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    /// Grid size of the contour.
    #[arg(long, default_value_t = 121)]
    pub grid_n: usize,
    /// Singularity strengths for the asymptotic check.
    #[arg(long = "a", value_delimiter = ',', default_value = "1,2,4")]
    pub a: Vec<f64>,
    /// Orders for the asymptotic check.
    #[arg(long = "k", value_delimiter = ',', default_value = "100000,200000")]
    pub k: Vec<usize>,
    /// Coefficients from an `expand` JSON document instead of the built-in table.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Slow-bond rate.
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 1e5)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = slowbond::simulator::MIN_BATCHES)]
    pub batches: usize,
    /// Burn-in time; defaults to max(10 (2L)^2, 1000).
    #[arg(long)]
    pub burn_in: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CoupleArgs {
    /// Half-size of the finite interval.
    #[arg(long = "L")]
    pub l: usize,
    /// Half-width of the window of the infinite systems; defaults to max(4L, 2 t-max).
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 30.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Consecutive seeds starting at `seed`.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, default_value_t = 30)]
    pub checkpoints: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    All,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Directory for the CSV files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Sizes of the semi-infinite zero sets.
    #[arg(long = "L", value_delimiter = ',', default_value = "5,10,20,40,80")]
    pub l: Vec<usize>,
    /// Largest ring for the ring zero sets.
    #[arg(long = "ring-L-max", default_value_t = 5)]
    pub ring_l_max: usize,
    #[arg(long, default_value_t = -1.5437, allow_negative_numbers = true)]
    pub r0: f64,
    #[arg(long, default_value = "7..16", value_parser = window)]
    pub window: (usize, usize),
}

#[derive(Debug, Args)]
pub struct GoldenArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long)]
    pub order: Option<usize>,
}
