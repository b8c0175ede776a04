mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_SEED: u64 = 20240101;

/// Numerical verification suites for L⁴ norms of Laplace eigenfunctions on
/// the Heisenberg nilmanifold.
#[derive(Debug, Parser)]
#[command(name = "heisenlab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Tolerance rows are judged against.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
    pub tol: f64,
    /// Quadrature grid size (a power of two).
    #[arg(long, global = true, default_value_t = DEFAULT_GRID, value_parser = power_of_two)]
    pub grid: usize,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "HEISENLAB_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Append the wall time to the summary (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hermite and Laguerre function checks, one row per degree.
    SpecialFn(commands::SpecialFnArgs),
    /// L⁴ norm by quadrature against the lattice sum, one row per random packet.
    KeyIdentity(commands::KeyIdentityArgs),
    /// L⁴/L² ratios of random sums over lattice points on circles.
    Zygmund(commands::ZygmundArgs),
    /// Ratios of the indicator-window family and their growth exponent.
    Sharpness(commands::SharpnessArgs),
    /// Eigenvalues of the Laplacian with multiplicities.
    Spectrum(commands::SpectrumArgs),
    /// Maximises the L⁴/L² ratio within one (λ, ℓ) sector.
    Extremize(commands::ExtremizeArgs),
    /// Orthonormality, eigen-equation and covariance of the eigenbasis.
    Basis(commands::BasisArgs),
    /// Refits the constants of the ratio sandwich.
    Calibrate(commands::CalibrateArgs),
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn power_of_two(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 2 && n.is_power_of_two() {
        Ok(n)
    } else {
        Err(format!("must be a power of two, got {s}"))
    }
}

fn run(cli: Cli) -> Result<report::Report, heisenlab::Error> {
    let g = &cli.global;
    match &cli.command {
        Command::SpecialFn(a) => commands::special_fn(g, a),
        Command::KeyIdentity(a) => commands::key_identity(g, a),
        Command::Zygmund(a) => commands::zygmund(g, a),
        Command::Sharpness(a) => commands::sharpness(g, a),
        Command::Spectrum(a) => commands::spectrum(g, a),
        Command::Extremize(a) => commands::extremize(g, a),
        Command::Basis(a) => commands::basis(g, a),
        Command::Calibrate(a) => commands::calibrate(g, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = cli.global.clone();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(global.threads).build_global() {
        eprintln!("heisenlab: {e}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let mut report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("heisenlab: {e}");
            let code = match e {
                heisenlab::Error::TruncationUnreachable { .. } => 3,
                _ => 2,
            };
            return ExitCode::from(code);
        }
    };
    if global.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    let mut buf = Vec::new();
    let written = match global.format {
        Format::Json => report.write_json(&mut buf),
        Format::Csv => report.write_csv(&mut buf),
    };
    let written = written.and_then(|_| match &global.output {
        Some(path) => std::fs::write(path, &buf),
        None => std::io::stdout().lock().write_all(&buf),
    });
    if let Err(e) = written {
        eprintln!("heisenlab: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.status.exit_code() as u8)
}
