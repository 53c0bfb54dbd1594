//! `jsr`: command-line front end for the jsr-core library.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jsr_core::JsrError;

#[derive(Parser)]
#[command(name = "jsr", version, about = "Joint spectral radius brackets, inflation curves and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket the joint spectral radius at a given product depth.
    Bounds(BoundsArgs),
    /// Bracket ρ(M + εB) on a grid of ε and optionally fit a Hölder exponent.
    Inflate(InflateArgs),
    /// Fit a Hölder exponent to a previously written inflation curve.
    Fit(FitArgs),
    /// Find a maximal common invariant flag.
    Flag(FlagArgs),
    /// Build a pointwise lower-bound certificate.
    Cert(CertArgs),
    /// Check a certificate against random perturbations.
    Verify(VerifyArgs),
    /// Check Elsner's spectral-radius perturbation bound.
    Elsner(ElsnerArgs),
    /// Resolvent-based lower bound for ρ(A + εB) of a single matrix.
    Resolvent(ResolventArgs),
    /// Check the uniform linear growth bound for a 2×2 set.
    Dim2(Dim2Args),
    /// Lift a continuous-time inclusion and bound its Lyapunov exponent.
    Lift(LiftArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Product depth.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Also bound with an extremal-norm approximation built from products up to this length.
    #[arg(long)]
    pub extremal: Option<usize>,
    /// Also bound with a quadratic norm fitted to products up to this length.
    #[arg(long)]
    pub ellipsoid: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallNorm {
    Spectral,
    Frobenius,
}

#[derive(Args, Debug, Serialize)]
pub struct InflateArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// `geo:<min>:<max>:<count>` or a comma-separated list.
    #[arg(long, default_value = "geo:1e-4:1e-1:37")]
    pub grid: String,
    /// Product depth for each bracket.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Norm of the full-space perturbation ball.
    #[arg(long, value_enum, default_value_t = BallNorm::Spectral)]
    pub ball: BallNorm,
    /// Random seed; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit a Hölder exponent at ε = 0.
    #[arg(long)]
    pub fit: bool,
    /// Write an SVG log-log plot of the curve.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    /// Curve written by `jsr inflate` (CSV or JSON).
    #[arg(long)]
    pub curve: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FlagArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Relative residual tolerance for invariance.
    #[arg(long, default_value_t = jsr_core::reducibility::DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CertArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Λ as a positive number, or `empirical`.
    #[arg(long, default_value = "empirical")]
    pub lambda: String,
    /// Depth used when Λ is estimated.
    #[arg(long, default_value_t = 8)]
    pub lambda_depth: usize,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Product lengths used to estimate Θ.
    #[arg(long, default_value_t = 12)]
    pub kmax: usize,
    /// Largest n scanned for n₀.
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Certificate JSON written by `jsr cert`.
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Probe index n; defaults to the certificate's n₀.
    #[arg(long)]
    pub n_probe: Option<usize>,
    /// Bracket depth for each perturbed set.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Random seed; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ElsnerArgs {
    /// Set whose first two members are compared; random pairs when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Dimensions cycled through by the random suite.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub dims: Vec<usize>,
    /// Random seed; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ResolventArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Index of the member to certify.
    #[arg(long, default_value_t = 0)]
    pub member: usize,
    /// Circle radius; half the spectral gap (capped at 0.9) when omitted.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = jsr_core::perturbation::DEFAULT_CIRCLE_SAMPLES)]
    pub samples: usize,
    /// Random (B, ε) checks of the certificate.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Random seed; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct Dim2Args {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct LiftArgs {
    /// Matrix-set JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of switching intervals on [0, 1].
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Random switching words besides the constant ones.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Bracket depth over the lifted set.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Random seed; recorded in the output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the lifted set as matrix-set JSON.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

/// Failure modes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Core(JsrError),
    Input(String),
    /// The command ran but its check found violations.
    CheckFailed(String),
}

impl From<JsrError> for CliError {
    fn from(e: JsrError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Core(e) => match e {
                JsrError::InvalidInput(_) | JsrError::DimensionMismatch { .. } | JsrError::Precondition(_) => 2,
                JsrError::BudgetExceeded { .. } => 3,
                JsrError::Inconclusive { .. } | JsrError::Numerical(_) => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bounds(a) => commands::bounds(a),
        Command::Inflate(a) => commands::inflate(a),
        Command::Fit(a) => commands::fit(a),
        Command::Flag(a) => commands::flag(a),
        Command::Cert(a) => commands::cert(a),
        Command::Verify(a) => commands::verify(a),
        Command::Elsner(a) => commands::elsner(a),
        Command::Resolvent(a) => commands::resolvent(a),
        Command::Dim2(a) => commands::dim2(a),
        Command::Lift(a) => commands::lift(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jsr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
