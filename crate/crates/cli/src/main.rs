// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Numerical verifiers, solvers and samplers for Yang-Baxter structures,
/// quantum groups, ASEP and stochastic vertex models.
#[derive(Debug, Parser)]
#[command(name = "integrable", version)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Tolerance every residual is judged against (command default if absent).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Emit the JSON report (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the bulk table as CSV instead of the JSON report.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for anything random.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Record the wall time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Check an algebraic identity for a family of matrices.
    #[command(subcommand)]
    Verify(Verify),
    /// Quantum-group relations on the (m+1)-dimensional representation.
    RepCheck(RepCheckArgs),
    /// Universal R-matrix on a pair of representations.
    UniversalR(UniversalRArgs),
    /// ASEP generator and its stationary distribution.
    #[command(subcommand)]
    Asep(Asep),
    /// Matrix product stationary measure of open ASEP.
    Mpa(MpaArgs),
    /// Fused higher-spin stochastic vertex weights.
    Fuse(FuseArgs),
    /// Sample six-vertex configurations on a rectangle.
    #[command(name = "sample6v")]
    Sample6v(Sample6vArgs),
    /// ASEP transition probability from the contour-integral formula.
    Twprob(TwprobArgs),
    /// Classical oscillator toolkit.
    #[command(subcommand)]
    Oscillator(Oscillator),
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Braided or spectral Yang-Baxter equation.
    Ybe(YbeArgs),
    /// Reflection equation for the open-ASEP boundary matrices.
    Reflection(ReflectionArgs),
    /// Hecke quadratic relation of the constant FRT matrix.
    Hecke(HeckeArgs),
    /// Regularity, Markov property and derivative at one of the ASEP family.
    Markov(MarkovArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum YbeFamily {
    Permutation,
    Identity,
    RAlphaBeta,
    Frt,
    Universal,
    AsepSpectral,
    Fused,
}

#[derive(Debug, Args)]
pub struct YbeArgs {
    #[arg(long, value_enum)]
    pub family: YbeFamily,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Spin label of the representation for `universal`.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Fusion level for `fused`.
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    #[arg(long, default_value_t = 0.3)]
    pub z: f64,
    #[arg(long, default_value_t = 0.6)]
    pub w: f64,
    /// Sweep the free parameters over a grid instead of one point.
    #[arg(long)]
    pub grid: bool,
}

#[derive(Debug, Args)]
pub struct ReflectionArgs {
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.4)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.3)]
    pub z: f64,
    #[arg(long, default_value_t = 0.7)]
    pub w: f64,
    #[arg(long)]
    pub grid: bool,
}

#[derive(Debug, Args)]
pub struct HeckeArgs {
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct RepCheckArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct UniversalRArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long = "L")]
    pub sites: usize,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Subcommand)]
pub enum Asep {
    /// Stationary distribution from the null space of the generator.
    Stationary(StationaryArgs),
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub rates: RateArgs,
    /// Include the boundary reservoirs; without it particles are conserved.
    #[arg(long)]
    pub open: bool,
    /// Particle number selecting the communicating class of the closed chain.
    #[arg(long)]
    pub particles: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MpaArgs {
    #[command(flatten)]
    pub rates: RateArgs,
    /// Starting truncation, doubled until the measure settles.
    #[arg(long, default_value_t = integrable::mpa::DEFAULT_TRUNCATION)]
    pub truncation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FuseMethod {
    Recurrence,
    Closed,
    Both,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub z: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = FuseMethod::Recurrence)]
    pub method: FuseMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryKind {
    Step,
}

#[derive(Debug, Args)]
pub struct Sample6vArgs {
    #[arg(long)]
    pub b1: f64,
    #[arg(long)]
    pub b2: f64,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long, value_enum, default_value_t = BoundaryKind::Step)]
    pub boundary: BoundaryKind,
    /// Independent configurations, trajectory i drawn from stream i.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct TwprobArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub q: f64,
    /// Initial positions, comma separated and increasing.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub y: Vec<i64>,
    /// Final positions, comma separated and increasing.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x: Vec<i64>,
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, default_value_t = 256)]
    pub nquad: usize,
    /// Also solve the master equation on a finite window and compare.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum Oscillator {
    /// Hermite polynomials at a point, with an orthogonality check.
    #[command(allow_negative_numbers = true)]
    Hermite(HermiteArgs),
    /// Ladder operators on a truncated Fock space.
    Fock(FockArgs),
    /// Jordan-Schwinger images of the sl2 basis.
    Js(FockArgs),
}

#[derive(Debug, Args)]
pub struct HermiteArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub x: f64,
}

#[derive(Debug, Args)]
pub struct FockArgs {
    #[arg(long, default_value_t = 6)]
    pub cutoff: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    let text = if cli.csv {
        match report.to_csv() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        report.to_json()
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
