use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "corrset",
    version,
    about = "Classical and quantum sets of CHSH correlation vectors"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetName {
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "Q", alias = "q")]
    Q,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Tolerance on membership margins.
    #[arg(
        long,
        global = true,
        env = "CORRSET_TOLERANCE",
        default_value_t = 1e-9,
        value_parser = parse_tolerance,
        allow_hyphen_values = true
    )]
    pub tolerance: f64,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format. `slice` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Use all cores. Results do not depend on this flag.
    #[arg(long, global = true)]
    pub parallel: bool,
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!(
            "tolerance must be a positive finite number, got {s}"
        ))
    }
}

/// A correlation vector given inline or as a JSON file.
#[derive(Debug, Clone, Args)]
pub struct VectorInput {
    /// The four correlators x1 x2 x3 x4.
    #[arg(
        num_args = 4,
        value_name = "X",
        allow_negative_numbers = true,
        required_unless_present = "input",
        conflicts_with = "input"
    )]
    pub x: Vec<f64>,
    /// JSON file holding `[x1, x2, x3, x4]` or `{"x": [...]}`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership report; exit 0 inside Q, 1 outside.
    Membership(VectorInput),
    /// Convex decomposition into at most three generators.
    Decompose(VectorInput),
    /// Explicit state and observables reproducing the vector.
    Realize(VectorInput),
    /// Re-checks a realization file and reports what it produces.
    Verify {
        /// Output of `realize`, or a bare realization object.
        file: PathBuf,
    },
    /// Random pure-state strategies and their correlation vectors.
    Sample {
        /// Number of samples.
        n: u64,
        /// Local dimensions of the two parties.
        #[arg(long, num_args = 2, value_names = ["DA", "DB"], default_values_t = [2usize, 2])]
        dims: Vec<usize>,
        /// Print only the summary.
        #[arg(long)]
        summary_only: bool,
    },
    /// Numerical checks backing the characterization.
    CheckLemmas(CheckArgs),
    /// The x1 = 1 cross-section of C or Q on an n by n grid of (x2, x3).
    Slice {
        /// Grid points per axis.
        n: usize,
        #[arg(value_enum, default_value = "Q")]
        which: SetName,
    },
    /// Component-wise (2/π) asin, or its inverse.
    Mu {
        #[command(flatten)]
        input: VectorInput,
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Grid step for both scans; overrides the individual steps.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub hessian_step: f64,
    /// Distance kept from the edges of the Hessian domain.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    #[arg(long, default_value_t = 0.02)]
    pub maximum_step: f64,
    /// Random points for each agreement check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Points this close to a boundary are left out of the μ check.
    #[arg(long, default_value_t = 1e-7)]
    pub band: f64,
    /// Adds a check that is known to fail, to exercise the failure path.
    #[arg(long)]
    pub force_violation: bool,
}
