use std::path::PathBuf;

use cachelab::analysis::{DemandCount, Preset};
use cachelab::rational::parse_rational;
use cachelab::{DeliveryMode, Rational};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cachelab", version, about = "Exact storage-rate bounds and coded caching simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format; defaults to csv for `curve` and `sweep`, human otherwise.
    #[arg(long, value_enum, global = true, conflicts_with_all = ["json", "csv", "human"])]
    pub format: Option<Format>,

    /// Same as `--format json`.
    #[arg(long, global = true, conflicts_with_all = ["csv", "human"])]
    pub json: bool,

    /// Same as `--format csv`.
    #[arg(long, global = true, conflicts_with = "human")]
    pub csv: bool,

    /// Same as `--format human`.
    #[arg(long, global = true)]
    pub human: bool,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    /// Number of format selectors given. clap does not check conflicts
    /// between a global flag placed before the subcommand and one after it.
    pub fn selectors(&self) -> usize {
        usize::from(self.format.is_some()) + usize::from(self.json) + usize::from(self.csv) + usize::from(self.human)
    }

    pub fn resolve(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else if self.human {
            Format::Human
        } else {
            self.format.unwrap_or(default)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lower bound on the optimal rate (or its cut-set baseline).
    Bound(BoundArgs),
    /// Achievable rate of the coded-multicast schemes.
    Rate(RateArgs),
    /// Run placement, delivery and decoding at a corner point.
    Simulate(SimulateArgs),
    /// Gap between achievable rate and lower bound over a grid of systems.
    Sweep(SweepArgs),
    /// Bound and rate columns along the cache-size axis.
    Curve(CurveArgs),
    /// Check the worked examples' linear inequalities.
    CaseStudy(CaseStudyArgs),
    /// Run the built-in verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cen,
    D2d,
}

impl From<ModeArg> for DeliveryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cen => DeliveryMode::Centralized,
            ModeArg::D2d => DeliveryMode::D2D,
        }
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Number of files.
    #[arg(long = "N", alias = "n")]
    pub n: usize,
    /// Number of users (devices).
    #[arg(long = "K", alias = "k")]
    pub k: usize,
    /// Files requested per user.
    #[arg(long = "L", alias = "l", default_value_t = 1)]
    pub l: usize,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Cache size in files, as `p/q` or an integer.
    #[arg(long = "M", alias = "m", value_parser = rational_arg)]
    pub m: Rational,
    /// Report the cut-set baseline instead of the new bound.
    #[arg(long)]
    pub cutset: bool,
    /// Include every `(s, ell)` term.
    #[arg(long)]
    pub terms: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalArg {
    Envelope,
    Formula,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long = "M", alias = "m", value_parser = rational_arg)]
    pub m: Rational,
    /// Memory-sharing envelope over the corners, or the closed form at `M`.
    #[arg(long, value_enum, default_value = "envelope")]
    pub eval: EvalArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemandsArg {
    Worst,
    Random,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Placement parameter; the cache size is `M = N t / K`.
    #[arg(long)]
    pub t: usize,
    /// Seed for the library and random demands (default: $CACHELAB_SEED or 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "worst")]
    pub demands: DemandsArg,
    /// File size in bits (default: smallest size that splits evenly).
    #[arg(long)]
    pub file_bits: Option<u64>,
    /// Write the transmission log as JSON to this path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Cen,
    D2d,
    Both,
}

fn range_arg(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once('-').or_else(|| s.split_once("..")) {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("range {s:?} must be lo-hi with 1 <= lo <= hi"));
    }
    Ok((lo, hi))
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub mode: SweepMode,
    /// Range of N, as `lo-hi` or a single value.
    #[arg(long = "N", alias = "n", value_parser = range_arg, default_value = "1-10")]
    pub n: (usize, usize),
    /// Range of K.
    #[arg(long = "K", alias = "k", value_parser = range_arg, default_value = "1-10")]
    pub k: (usize, usize),
    /// Comma-separated demand counts; `N` means L = N.
    #[arg(long = "L", alias = "l", value_delimiter = ',', default_value = "1,2,3,N")]
    pub l: Vec<DemandCount>,
    /// Uniform grid points per unit of M/N, on top of corners and regime boundaries.
    #[arg(long, default_value_t = 20)]
    pub density: usize,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Evenly spaced cache sizes, in addition to the corner points.
    #[arg(long, default_value_t = 21)]
    pub points: usize,
}

#[derive(Args, Debug)]
pub struct CaseStudyArgs {
    /// CEN_N3K3, CEN_N2K2 or D2D_N3K3; all presets when omitted.
    #[arg(long)]
    pub preset: Option<Preset>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("level").args(["quick", "full"]).multiple(false)))]
pub struct VerifyArgs {
    /// Case studies and small grids (default).
    #[arg(long)]
    pub quick: bool,
    /// The complete grids.
    #[arg(long)]
    pub full: bool,
}
