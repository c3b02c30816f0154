//! `nu-spectral`: reduce GHEs, solve the built-in potentials, evaluate
//! special functions and run the verification suite.
//!
//! Exit codes: 0 success, 2 parse/usage, 3 domain or math error,
//! 4 verification failure.

mod eval;
mod output;
mod reduce;
mod solve;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "nu-spectral", version, about = "Nikiforov-Uvarov spectral toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a GHE to hypergeometric form and report every branch.
    Reduce(ReduceArgs),
    /// Bound spectrum of a built-in potential.
    Solve(SolveArgs),
    /// Evaluate a hypergeometric-type function.
    Eval(EvalArgs),
    /// Check a potential against the finite-difference oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Io {
    /// Output file (default stdout).
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct PotentialArgs {
    /// harmonic, morse or rosen-morse2.
    #[arg(long)]
    pub potential: String,
    /// Comma-separated `key=value` pairs.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub params: String,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// GHE text, e.g. `phi=1 psi_tilde=0 phi_tilde=eps,0,-1 interval=-inf,inf`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["ghe_file", "potential"])]
    pub ghe: Option<String>,
    #[arg(long, conflicts_with = "potential")]
    pub ghe_file: Option<PathBuf>,
    /// Reduce the table GHE of a built-in potential instead.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "potential")]
    pub params: Option<String>,
    /// Comma-separated probe energies for branch selection.
    #[arg(long, allow_hyphen_values = true)]
    pub probes: Option<String>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    /// Highest level requested; the cutoff may truncate it.
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Append finite-difference eigenvalues and relative errors.
    #[arg(long)]
    pub with_oracle: bool,
    /// Relative tolerance for the oracle comparison.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory for per-state `psi_<n>.csv` samples.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Sample range `lo,hi,count` in the physical coordinate.
    #[arg(long, allow_hyphen_values = true, requires = "samples")]
    pub sample_range: Option<String>,
    /// CSV dump of the polynomial coefficients, ascending.
    #[arg(long)]
    pub poly_dump: Option<PathBuf>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    #[value(name = "2f1")]
    Hyp2f1,
    #[value(name = "2f1r")]
    Hyp2f1Regularized,
    #[value(name = "2f1-limit")]
    Hyp2f1Limit,
    #[value(name = "1f1")]
    Hyp1f1,
    #[value(name = "1f1r")]
    Hyp1f1Regularized,
    #[value(name = "u")]
    TricomiU,
    Hermite,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: Function,
    /// Parameters accept real or complex decimals (`1.5`, `-2`, `0.5+2i`).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Oracle box `lo,hi,points` in the reduced coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Override only the number of grid points (small values force a
    /// too-coarse grid).
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: Io,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reduce(a) => reduce::run(&a),
        Command::Solve(a) => solve::run(&a),
        Command::Eval(a) => eval::run(&a),
        Command::Verify(a) => verify::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
