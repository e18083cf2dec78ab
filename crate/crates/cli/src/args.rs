use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moyal_core::Method;

pub const DEFAULT_GRID: &str = "256:-10:10";

/// Phase-space quantum mechanics from the command line: build states,
/// transform them between representations, evolve them and run the
/// verification suites.
#[derive(Debug, Parser)]
#[command(name = "moyal-phase", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a wavefunction from one of the state factories.
    State {
        #[command(subcommand)]
        kind: StateKind,
    },
    /// Convert a wavefunction, density or Wigner file to another representation.
    Transform(TransformArgs),
    /// Evolve a state in an external potential.
    Evolve(EvolveArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Grid as `N:min:max` (half-open, N points).
    #[arg(long, default_value = DEFAULT_GRID, allow_hyphen_values = true)]
    pub grid: String,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum StateKind {
    /// Gaussian packet exp(-a^2 (x - x0)^2 / 2 + i p0 x).
    Gaussian {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p0: f64,
        /// Inverse width.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Oscillator eigenstate of level n (unit mass and frequency).
    Fock {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Even superposition of Gaussians at ±sep/2.
    Cat {
        #[arg(long, allow_negative_numbers = true)]
        sep: f64,
        /// Inverse width of each component.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Wigner,
    Characteristic,
    Density,
    Marginal,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Representation to produce.
    pub which: Target,
    /// Wavefunction, density or Wigner CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialKind {
    Free,
    Linear,
    Harmonic,
    Quartic,
    DoubleWell,
    Tabulated,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    /// Slope of the linear potential.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub slope: f64,
    /// Frequency of the harmonic potential.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,
    /// Coefficient of the quartic potential lambda x^4.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Barrier scale of the double well depth (x^2 - well^2)^2.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub depth: f64,
    /// Minima of the double well at ±well.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub well: f64,
    /// Tabulated potential: one value per grid point, one per line.
    #[arg(long, required_if_eq("potential", "tabulated"))]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Wavefunction, density or Wigner CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub potential: PotentialArgs,
    /// moyal, density_liouville or schrodinger_oracle.
    #[arg(long, default_value = "moyal")]
    pub method: Method,
    /// Time step; with `--time`, the largest step allowed.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: f64,
    /// Number of steps.
    #[arg(long, required_unless_present = "time", conflicts_with = "time")]
    pub steps: Option<usize>,
    /// Total time, split into equal steps no longer than `--dt`.
    #[arg(long, allow_negative_numbers = true)]
    pub time: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
    /// Final state; Wigner for moyal, density for density_liouville,
    /// wavefunction for schrodinger_oracle.
    #[arg(long)]
    pub out: PathBuf,
    /// Run all three engines and report their pairwise differences.
    /// The final state written is the Wigner function of `--method`.
    #[arg(long)]
    pub compare: bool,
    /// Path of the comparison report (default: `<out>.compare.json`).
    #[arg(long, requires = "compare")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Weyl,
    Idempotent,
    Bridge,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: Suite,
    /// Fock-space dimension.
    #[arg(long, default_value_t = 48)]
    pub dim: usize,
    /// Half-width of the quadrature box.
    #[arg(long = "box", default_value_t = 8.0, allow_negative_numbers = true)]
    pub box_half_width: f64,
    /// Quadrature node spacing.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub step: f64,
    /// JSON report path.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON file of tolerance overrides, `{"check": value}`.
    #[arg(long)]
    pub tolerances: Option<PathBuf>,
    /// Single tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Report timestamp. Defaults to SOURCE_DATE_EPOCH, then the clock.
    #[arg(long)]
    pub timestamp: Option<String>,
}
