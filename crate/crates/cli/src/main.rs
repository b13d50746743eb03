mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracpk::FracOrder;
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "fracpk",
    version,
    about = "Fractional Gagliardo energies, Poincare constants and Dirichlet eigenvalues"
)]
#[command(args_override_self = true, allow_negative_numbers = true)]
struct Cli {
    /// Output file; written atomically. Standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; the default depends on the command.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "FRACPK_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the strip and box-strip closed forms against quadrature and Monte Carlo.
    VerifyKernels(VerifyKernelsArgs),
    /// Seminorm breakdown of the indicator of a domain.
    Seminorm(SeminormArgs),
    /// Rayleigh quotients of the counterexample test functions.
    Counterexample(CounterexampleArgs),
    /// Sufficient and necessary condition checks.
    Check(CheckArgs),
    /// Discrete Dirichlet eigenvalues of a domain.
    Eigen(EigenArgs),
    /// Eigenvalues of long rectangles against the cross-section reference.
    Asymptotics(AsymptoticsArgs),
    /// Show or regenerate the stored reference constants.
    Constants(ConstantsArgs),
}

fn order(v: &str) -> Result<FracOrder, String> {
    let x: f64 = v.parse().map_err(|e| format!("{e}"))?;
    FracOrder::new(x).map_err(|e| e.to_string())
}

/// `NxM` cell counts.
fn grid(v: &str) -> Result<[usize; 2], String> {
    let (a, b) = v.split_once('x').unwrap_or((v, "1"));
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("grid {v:?}: {e}"));
    Ok([p(a)?, p(b)?])
}

/// `arc:<a>:<b>:<count>` with angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct ArcSpec {
    a: f64,
    b: f64,
    count: usize,
}

fn arc(v: &str) -> Result<ArcSpec, String> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        ["arc", a, b, c] => {
            let f = |t: &str| t.parse::<f64>().map_err(|e| format!("directions {v:?}: {e}"));
            let count = c.parse::<usize>().map_err(|e| format!("directions {v:?}: {e}"))?;
            Ok(ArcSpec { a: f(a)?, b: f(b)?, count })
        }
        _ => Err(format!("directions must look like arc:<a>:<b>:<count>, got {v:?}")),
    }
}

#[derive(Debug, Args, Serialize)]
struct VerifyKernelsArgs {
    /// Orders to test.
    #[arg(long, value_parser = order, value_delimiter = ',', action = clap::ArgAction::Set, required = true)]
    s: Vec<FracOrder>,
    /// Random cases per closed form.
    #[arg(long, default_value_t = 20)]
    cases: usize,
    /// Monte Carlo samples per case.
    #[arg(long, default_value_t = 1 << 16)]
    samples: u64,
    /// Relative tolerance against the quadrature oracle.
    #[arg(long, default_value_t = 1e-5)]
    quad_rtol: f64,
    /// Allowed Monte Carlo deviation in standard errors.
    #[arg(long, default_value_t = 3.0)]
    z_max: f64,
}

#[derive(Debug, Args, Serialize)]
struct SeminormArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Defaults to the order stored in the domain file.
    #[arg(long, value_parser = order)]
    s: Option<FracOrder>,
    /// Also evaluate the line decomposition.
    #[arg(long)]
    loss_sloane: bool,
    #[arg(long, default_value_t = 512)]
    angles: usize,
    #[arg(long, default_value_t = 0.01)]
    spacing: f64,
}

#[derive(Debug, Args, Serialize)]
struct CounterexampleArgs {
    #[arg(long, value_parser = order)]
    s: FracOrder,
    #[arg(long, default_value_t = 3.0)]
    beta: f64,
    /// Height exponent: the test function uses `⌈k^A⌉` rows.
    #[arg(long = "A", default_value_t = 3.0)]
    #[serde(rename = "A")]
    a: f64,
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, required = true)]
    k: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Condition {
    Density,
    Ls,
    Interval,
    PlainBall,
    ExtendedBall,
}

#[derive(Debug, Args, Serialize)]
struct CheckArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, value_enum)]
    condition: Condition,
    #[arg(long, value_parser = order)]
    s: Option<FracOrder>,
    /// Ball radius of the density condition.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    r: Option<f64>,
    /// `x0,x1,y0,y1`; infinite entries are not allowed.
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set)]
    window: Vec<f64>,
    /// Lattice points per axis for the density scan.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, value_parser = arc)]
    directions: Option<ArcSpec>,
    /// Parallel lines per direction.
    #[arg(long, default_value_t = 64)]
    line_samples: usize,
    /// Radius search resolution for the ball bounds.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    Full,
    Regional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ElementArg {
    P0,
    P1,
}

#[derive(Debug, Args, Serialize)]
struct EigenArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, value_parser = order)]
    s: Option<FracOrder>,
    /// Cell counts `NxM` (2D) or `N` (1D, per interval for P1).
    #[arg(long, value_parser = grid, default_value = "64x16")]
    grid: [usize; 2],
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// 1D only; 2D always uses P0.
    #[arg(long, value_enum, default_value_t = ElementArg::P0)]
    elements: ElementArg,
    /// Refinement factors for a ladder of the first eigenvalue.
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set)]
    ladder: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
struct AsymptoticsArgs {
    #[arg(long, value_parser = order)]
    s: FracOrder,
    /// Cross-section interval `a,b`.
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, default_value = "0,1")]
    omega: Vec<f64>,
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set, required = true)]
    ells: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Cells per unit length, the same for every `ell`.
    #[arg(long, default_value_t = 4)]
    cells_per_unit: usize,
}

#[derive(Debug, Args, Serialize)]
struct ConstantsArgs {
    /// Recompute instead of printing the shipped table.
    #[arg(long)]
    regenerate: bool,
    /// Orders to regenerate; defaults to those in the shipped table.
    #[arg(long, value_parser = order, value_delimiter = ',', action = clap::ArgAction::Set)]
    orders: Vec<FracOrder>,
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
